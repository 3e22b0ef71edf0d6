#!/usr/bin/env python3
"""Run the full synthetic benchmark and emit per-sparsity plot data.

Equivalent to:

    sparseucb run --config configs/benchmark.yaml --out <outdir>
    sparseucb plotdata --traces <outdir>/S<k>/traces.csv --svg ...   (per k)

but bundled as a single command with a final summary table of mean
cumulative regret at the horizon.
"""

import argparse
import csv
import sys
from pathlib import Path

from sparseucb.cli import main as cli_main

REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG = REPO_ROOT / "configs" / "benchmark.yaml"


def final_regrets(aggregate_csv: Path) -> dict[str, float]:
    finals: dict[str, float] = {}
    with open(aggregate_csv) as fh:
        for row in csv.DictReader(fh):
            finals[row["policy_label"]] = float(row["mean_cum_regret"])
    return finals


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(DEFAULT_CONFIG))
    parser.add_argument("--out", default="results/benchmark")
    parser.add_argument("--reps", type=int, default=None,
                        help="override repetition count (e.g. 2 for a dry run)")
    parser.add_argument("--stride", type=int, default=100,
                        help="subsampling stride for plot data")
    parser.add_argument("--no-plots", action="store_true")
    args = parser.parse_args(argv)

    run_args = ["run", "--config", args.config, "--out", args.out]
    if args.reps is not None:
        run_args += ["--reps", str(args.reps)]
    rc = cli_main(run_args)
    if rc != 0:
        return rc

    out = Path(args.out)
    sdirs = sorted(out.glob("S*"), key=lambda p: int(p.name[1:]))
    if not args.no_plots:
        for sdir in sdirs:
            rc = cli_main(["plotdata",
                           "--traces", str(sdir / "traces.csv"),
                           "--stride", str(args.stride),
                           "--out", str(sdir / "plotdata.csv"),
                           "--svg", str(sdir / "regret.svg")])
            if rc != 0:
                return rc

    print("\nmean cumulative regret at the horizon:")
    labels = None
    for sdir in sdirs:
        finals = final_regrets(sdir / "aggregate.csv")
        if labels is None:
            labels = list(finals)
            print("  S    " + "".join(f"{lab:>12}" for lab in labels))
        print(f"  {sdir.name[1:]:<4} "
              + "".join(f"{finals[lab]:12.1f}" for lab in labels))
    return 0


if __name__ == "__main__":
    sys.exit(main())
