"""Command-line harness: config parsing, the run / plotdata / selftest
commands, and the CSV result formats.

Result layout: one directory per sparsity level (``S<k>/``) under the output
directory, each holding traces.csv, aggregate.csv and manifest.yaml. The
manifest is itself a valid config file that reproduces the run bit-for-bit.
Numbers are serialized with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import argparse
import csv
import os
import shutil
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .harness import (AggregateResult, ExperimentConfig, PolicySpec,
                      RegretTrace, aggregate, run_sparsity_experiment)

OUT_DIR_ENV = "SPARSEUCB_OUT"

_TOP_KEYS = {"instance", "run", "ladder", "policies", "meta"}
_INSTANCE_KEYS = {"d", "k_actions", "sparsity", "noise", "sigma"}
_RUN_KEYS = {"horizon", "repetitions", "base_seed", "shared_noise",
             "refresh_period"}
_LADDER_KEYS = {"n_levels", "mode"}
_POLICY_KEYS = {"label", "kind", "dist", "prior", "c_param", "explore_q",
                "eta", "level"}


class ConfigError(ValueError):
    pass


def _check_keys(mapping, allowed, path):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected a mapping")
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _require(mapping, key, path):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}: required key missing")
    return mapping[key]


def parse_config_dict(doc: dict) -> ExperimentConfig:
    _check_keys(doc, _TOP_KEYS, "config")
    inst = _require(doc, "instance", "config")
    run = _require(doc, "run", "config")
    ladder = doc.get("ladder", {})
    _check_keys(inst, _INSTANCE_KEYS, "instance")
    _check_keys(run, _RUN_KEYS, "run")
    _check_keys(ladder, _LADDER_KEYS, "ladder")

    policies_doc = _require(doc, "policies", "config")
    if not isinstance(policies_doc, list) or not policies_doc:
        raise ConfigError("policies: expected a nonempty list")
    specs = []
    for i, pdoc in enumerate(policies_doc):
        path = f"policies[{i}]"
        _check_keys(pdoc, _POLICY_KEYS, path)
        try:
            specs.append(PolicySpec(
                label=str(_require(pdoc, "label", path)),
                kind=str(_require(pdoc, "kind", path)),
                dist=str(pdoc.get("dist", "uniform")),
                prior=str(pdoc.get("prior", "uniform")),
                c_param=float(pdoc.get("c_param", 1.0)),
                explore_q=float(pdoc.get("explore_q", 0.0)),
                eta=None if pdoc.get("eta") is None else float(pdoc["eta"]),
                level=int(pdoc.get("level", 0)),
            ))
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    d = int(_require(inst, "d", "instance"))
    sparsity = inst.get("sparsity", [1])
    if isinstance(sparsity, int):
        sparsity = [sparsity]
    try:
        return ExperimentConfig(
            d=d,
            horizon=int(_require(run, "horizon", "run")),
            policies=tuple(specs),
            k_actions=int(inst.get("k_actions", 30)),
            sparsity=tuple(int(s) for s in sparsity),
            repetitions=int(run.get("repetitions", 20)),
            n_levels=int(ladder.get("n_levels", 6)),
            ladder_mode=str(ladder.get("mode", "time_dependent")),
            noise=str(inst.get("noise", "uniform")),
            sigma=float(inst.get("sigma", 1.0)),
            base_seed=int(run.get("base_seed", 0)),
            refresh_period=int(run.get("refresh_period", 1000)),
            shared_noise=bool(run.get("shared_noise", False)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(path) -> ExperimentConfig:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    return parse_config_dict(doc)


def config_to_dict(config: ExperimentConfig) -> dict:
    """Fully resolved config as a plain mapping (the manifest body)."""
    return {
        "instance": {
            "d": config.d,
            "k_actions": config.k_actions,
            "sparsity": list(config.sparsity),
            "noise": config.noise,
            "sigma": config.sigma,
        },
        "run": {
            "horizon": config.horizon,
            "repetitions": config.repetitions,
            "base_seed": config.base_seed,
            "shared_noise": config.shared_noise,
            "refresh_period": config.refresh_period,
        },
        "ladder": {
            "n_levels": config.n_levels,
            "mode": config.ladder_mode,
        },
        "policies": [
            {
                "label": p.label, "kind": p.kind, "dist": p.dist,
                "prior": p.prior, "c_param": p.c_param,
                "explore_q": p.explore_q, "eta": p.eta, "level": p.level,
            }
            for p in config.policies
        ],
    }


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_traces(path, traces):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["policy_label", "seed", "t", "inst_regret", "cum_regret",
                    "level"])
        for tr in traces:
            for t in range(tr.instantaneous.size):
                w.writerow([tr.label, tr.seed, t + 1,
                            _fmt(tr.instantaneous[t]), _fmt(tr.cumulative[t]),
                            int(tr.levels[t])])


def read_traces(path):
    """Parse a traces file back into RegretTrace objects (grouped by
    (policy, seed), in file order)."""
    groups: dict = {}
    order = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["policy_label", "seed", "t", "inst_regret",
                      "cum_regret", "level"]:
            raise ValueError(f"{path}:1: unexpected traces header")
        for lineno, row in enumerate(reader, start=2):
            try:
                label, seed, _t, inst, cum, level = row
                key = (label, int(seed))
                if key not in groups:
                    groups[key] = ([], [], [])
                    order.append(key)
                groups[key][0].append(float(inst))
                groups[key][1].append(float(cum))
                groups[key][2].append(int(level))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row") from exc
    return [
        RegretTrace(label=label, seed=seed,
                    instantaneous=np.array(inst), cumulative=np.array(cum),
                    levels=np.array(levels, dtype=np.int64), wall_seconds=0.0)
        for (label, seed), (inst, cum, levels) in
        ((k, groups[k]) for k in order)
    ]


def write_aggregate(path, aggs):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["policy_label", "t", "mean_cum_regret", "std_cum_regret"])
        for agg in aggs:
            for t in range(agg.mean.size):
                w.writerow([agg.label, t + 1, _fmt(agg.mean[t]),
                            _fmt(agg.std[t])])


def write_manifest(path, config: ExperimentConfig):
    doc = config_to_dict(config)
    doc["meta"] = {"artifact_version": __version__}
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


def _default_out() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "results"))


def cmd_run(args) -> int:
    try:
        config = parse_config(args.config)
    except (ConfigError, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.reps is not None:
        overrides["repetitions"] = args.reps
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.shared_noise is not None:
        overrides["shared_noise"] = args.shared_noise
    if overrides:
        from dataclasses import replace
        config = replace(config, **overrides)

    out = Path(args.out) if args.out else _default_out()
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".writable"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return 2

    written = []
    try:
        for sparsity in config.sparsity:
            traces, aggs = run_sparsity_experiment(config, sparsity)
            subdir = out / f"S{sparsity}"
            subdir.mkdir(parents=True, exist_ok=True)
            written.append(subdir)
            write_traces(subdir / "traces.csv", traces)
            write_aggregate(subdir / "aggregate.csv", aggs)
            write_manifest(subdir / "manifest.yaml", config)
            print(f"S={sparsity}: wrote {subdir}/{{traces,aggregate}}.csv")
    except Exception as exc:
        for subdir in written:
            shutil.rmtree(subdir, ignore_errors=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_plotdata(args) -> int:
    try:
        traces = read_traces(args.traces)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    labels = []
    for tr in traces:
        if tr.label not in labels:
            labels.append(tr.label)
    aggs = {label: aggregate([t for t in traces if t.label == label])
            for label in labels}
    horizon = next(iter(aggs.values())).mean.size
    stride = max(int(args.stride), 1)
    rows = list(range(stride - 1, horizon, stride))
    if rows and rows[-1] != horizon - 1:
        rows.append(horizon - 1)

    out_path = Path(args.out) if args.out else Path(args.traces).with_name(
        "plotdata.csv")
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["t"]
        for label in labels:
            header += [f"{label}_mean", f"{label}_lo", f"{label}_hi"]
        w.writerow(header)
        for t in rows:
            row = [t + 1]
            for label in labels:
                agg = aggs[label]
                m, s = agg.mean[t], agg.std[t]
                row += [_fmt(m), _fmt(m - s), _fmt(m + s)]
            w.writerow(row)
    print(f"wrote {out_path}")

    if args.svg:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        fig, ax = plt.subplots(figsize=(6, 4))
        ts = np.array(rows) + 1
        for label in labels:
            agg = aggs[label]
            ax.plot(ts, agg.mean[rows], label=label)
            ax.fill_between(ts, (agg.mean - agg.std)[rows],
                            (agg.mean + agg.std)[rows], alpha=0.2)
        ax.set_xlabel("round")
        ax.set_ylabel("cumulative regret")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.svg)
        plt.close(fig)
        print(f"wrote {args.svg}")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest
    return run_selftest(seed=args.seed if args.seed is not None else 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparseucb",
        description="Linear-bandit model-selection benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--reps", type=int, default=None)
    p_run.add_argument("--horizon", type=int, default=None)
    p_run.add_argument("--out", default=None,
                       help=f"output directory (default ${OUT_DIR_ENV} or ./results)")
    p_run.add_argument("--shared-noise", type=lambda s: s.lower() == "true",
                       default=None, metavar="BOOL")
    p_run.set_defaults(func=cmd_run)

    p_plot = sub.add_parser("plotdata",
                            help="emit downsampled mean/std columns from a traces file")
    p_plot.add_argument("--traces", required=True)
    p_plot.add_argument("--stride", type=int, default=10)
    p_plot.add_argument("--out", default=None)
    p_plot.add_argument("--svg", default=None,
                        help="also write a vector-graphics regret plot")
    p_plot.set_defaults(func=cmd_plotdata)

    p_self = sub.add_parser("selftest",
                            help="run invariant suites on random instances")
    p_self.add_argument("--seed", type=int, default=None)
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
