#!/usr/bin/env python3
"""Time a single benchmark-scale episode per policy kind.

Useful for estimating total benchmark wall time before launching it:
total ~= (sum of per-episode times) x repetitions x sparsity levels.
"""

import argparse
import sys
import time

import numpy as np

from sparseucb.environment import generate_fixed_sphere_instance
from sparseucb.harness import ExperimentConfig, PolicySpec, build_policy, run_episode

ROSTER = (
    PolicySpec(label="OFUL", kind="oful"),
    PolicySpec(label="Greedy", kind="greedy"),
    PolicySpec(label="AL_Unif", kind="ada_linucb", prior="uniform"),
    PolicySpec(label="SL_Theory", kind="sparse_linucb", dist="theory"),
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=16)
    parser.add_argument("--k-actions", type=int, default=30)
    parser.add_argument("--horizon", type=int, default=10 ** 4)
    parser.add_argument("--sparsity", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    config = ExperimentConfig(
        d=args.d, horizon=args.horizon, k_actions=args.k_actions,
        sparsity=(args.sparsity,), repetitions=1, base_seed=args.seed,
        policies=ROSTER)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    inst = generate_fixed_sphere_instance(
        args.d, args.k_actions, args.sparsity, rng)

    total = 0.0
    for spec in ROSTER:
        policy = build_policy(spec, config, args.sparsity)
        t0 = time.perf_counter()
        trace = run_episode(
            inst, policy, args.horizon,
            np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(1,))),
            np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(2,))))
        dt = time.perf_counter() - t0
        total += dt
        print(f"{spec.label:<10} {dt:6.2f}s   final regret "
              f"{trace.cumulative[-1]:8.1f}")
    print(f"{'total':<10} {total:6.2f}s per repetition of this roster")
    return 0


if __name__ == "__main__":
    sys.exit(main())
