"""Runtime invariant checks on freshly generated random instances, exposed
through the ``selftest`` CLI command. One pass/fail line per check."""

from __future__ import annotations

import numpy as np

from .confidence import LadderMode, RadiusLadder
from .covariance import CovarianceState
from .environment import generate_fixed_sphere_instance
from .harness import (ExperimentConfig, PolicySpec, run_sparsity_experiment)
from .policies import Exp3State, exp3_probs, ucb_argmax


def _check_linear_algebra(rng) -> list:
    results = []
    d, t_len = 8, 400
    state = CovarianceState(d, refresh_period=10 ** 9)
    det_ok = True
    potential = 0.0
    for _ in range(t_len):
        a = rng.standard_normal(d)
        a /= np.linalg.norm(a)
        before = state.log_det
        norm = state.mahalanobis_norm(a)
        state.rank_one_update(a)
        det_ok &= abs((state.log_det - before) - np.log1p(norm ** 2)) <= 1e-8
        potential += min(1.0, norm ** 2)
    results.append(("det-ratio identity", det_ok))
    results.append(("elliptic potential", potential <= 2.0 * state.log_det + 1e-6))
    results.append(("determinant-trace bound",
                    state.log_det <= d * np.log(1.0 + t_len / d) + 1e-9))
    inv_err = np.max(np.abs(state.v_inv - np.linalg.inv(state.v)))
    results.append(("maintained inverse", inv_err <= 1e-8))
    return results


def _check_exp3(rng) -> list:
    exp3 = Exp3State(prior=np.full(6, 1.0 / 6.0))
    exp3.cumulative = rng.uniform(-1e6, 0.0, size=6)
    p = exp3_probs(exp3, t=123)
    ok = np.all(p >= 0.0) and abs(p.sum() - 1.0) <= 1e-12
    return [("exp3 distribution validity", bool(ok))]


def _check_level_monotonicity(rng) -> list:
    inst = generate_fixed_sphere_instance(8, 15, 4, rng)
    actions = inst.provider.next_set([])
    ladder = RadiusLadder(n_levels=6, mode=LadderMode.TIME_DEPENDENT,
                          horizon=500, include_greedy_level=True)
    state = CovarianceState(8)
    ok = True
    for t in range(1, 101):
        norms = [state.mahalanobis_norm(
            ucb_argmax(actions, state, ladder.radius(lv, t))[1])
            for lv in range(ladder.n_levels)]
        ok &= all(norms[i] <= norms[i + 1] + 1e-10
                  for i in range(len(norms) - 1))
        idx, a = ucb_argmax(actions, state, ladder.radius(t % 6, t))
        state.rank_one_update(a)
        state.rls_update(a, float(a @ inst.theta_star))
    return [("level-norm monotonicity", ok)]


def _check_determinism(seed) -> list:
    config = ExperimentConfig(
        d=4, horizon=200, k_actions=6, sparsity=(2,), repetitions=2,
        base_seed=seed,
        policies=(PolicySpec(label="SL", kind="sparse_linucb", dist="uniform"),
                  PolicySpec(label="AL", kind="ada_linucb")))
    (tr1, _), (tr2, _) = (run_sparsity_experiment(config, 2) for _ in range(2))
    ok = all(np.array_equal(a.cumulative, b.cumulative)
             and np.array_equal(a.levels, b.levels)
             for a, b in zip(tr1, tr2))
    return [("seed determinism", ok)]


def run_selftest(seed: int = 0) -> int:
    rng = np.random.default_rng(seed)
    results = []
    results += _check_linear_algebra(rng)
    results += _check_exp3(rng)
    results += _check_level_monotonicity(rng)
    results += _check_determinism(seed)
    failed = 0
    for name, ok in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
        failed += not ok
    return 1 if failed else 0
