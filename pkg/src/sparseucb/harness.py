"""Seeded episode execution, multi-repetition experiments and regret
aggregation.

Seed derivation is counter-based: every random stream is a
``np.random.SeedSequence(base_seed, spawn_key=...)`` keyed by a stream tag,
the sparsity level, the repetition index, and (for per-policy streams) a
CRC32 of the policy label. Adding or reordering roster entries therefore
never perturbs other policies' draws.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .confidence import LadderMode, RadiusLadder
from .environment import (BanditInstance, RoundRecord,
                          generate_fixed_sphere_instance, instantaneous_regret,
                          noise_draw)
from .policies import (AdaLinUcbPolicy, BanditPolicy, Exp3State,
                       FixedLevelPolicy, GreedyPolicy, OfulPolicy,
                       SelectionDistribution, SparseLinUcbPolicy, point_mass,
                       theory_distribution, uniform_distribution)

# Stream tags for spawn keys.
_STREAM_INSTANCE = 0
_STREAM_POLICY = 1
_STREAM_NOISE_SHARED = 2
_STREAM_NOISE = 3

POLICY_KINDS = ("oful", "greedy", "fixed", "sparse_linucb", "ada_linucb")
DIST_KINDS = ("uniform", "theory", "known", "point")


@dataclass(frozen=True)
class PolicySpec:
    """One roster entry. ``dist`` applies to sparse_linucb ("uniform",
    "theory", "known", "point"); ``prior`` to ada_linucb ("uniform",
    "theory"); ``level`` to fixed and point; ``eta`` None selects the
    time-varying Exp3 rate."""

    label: str
    kind: str
    dist: str = "uniform"
    prior: str = "uniform"
    c_param: float = 1.0
    explore_q: float = 0.0
    eta: Optional[float] = None
    level: int = 0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "sparse_linucb" and self.dist not in DIST_KINDS:
            raise ValueError(f"unknown distribution {self.dist!r}")
        if self.kind == "ada_linucb" and self.prior not in ("uniform", "theory"):
            raise ValueError(f"unknown prior {self.prior!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    horizon: int
    policies: tuple
    k_actions: int = 30
    sparsity: tuple = (1,)
    repetitions: int = 20
    n_levels: int = 6
    ladder_mode: str = "time_dependent"
    noise: str = "uniform"
    sigma: float = 1.0
    base_seed: int = 0
    refresh_period: int = 1000
    shared_noise: bool = False

    def __post_init__(self):
        if self.horizon < 1 or self.repetitions < 1:
            raise ValueError("horizon and repetitions must be >= 1")
        labels = [p.label for p in self.policies]
        if len(set(labels)) != len(labels):
            raise ValueError("policy labels must be distinct")
        if any(not 1 <= s <= self.d for s in self.sparsity):
            raise ValueError("sparsity levels must lie in [1, d]")

    def ladder(self) -> RadiusLadder:
        mode = LadderMode(self.ladder_mode)
        return RadiusLadder(
            n_levels=self.n_levels, mode=mode, horizon=self.horizon,
            include_greedy_level=(mode is LadderMode.TIME_DEPENDENT))


@dataclass
class RegretTrace:
    label: str
    seed: int  # repetition index within the experiment
    instantaneous: np.ndarray
    cumulative: np.ndarray
    levels: np.ndarray  # per-round chosen level, -1 for level-free policies
    wall_seconds: float


@dataclass
class AggregateResult:
    label: str
    mean: np.ndarray
    std: np.ndarray
    repetitions: int


def _label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def _rng(base_seed: int, *spawn_key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(base_seed,
                                                        spawn_key=spawn_key))


def known_level(sparsity: int, n_levels: int) -> int:
    """Ladder level matched to a known sparsity: radius about 2 S log t,
    i.e. level ceil(log2 S) + 1, clamped to the ladder top."""
    return min(math.ceil(math.log2(sparsity)) + 1, n_levels - 1)


def build_policy(spec: PolicySpec, config: ExperimentConfig,
                 sparsity: int) -> BanditPolicy:
    ladder = config.ladder()
    kw = dict(refresh_period=config.refresh_period)
    if spec.kind == "oful":
        return OfulPolicy(config.d, config.horizon, **kw)
    if spec.kind == "greedy":
        return GreedyPolicy(config.d, **kw)
    if spec.kind == "fixed":
        return FixedLevelPolicy(config.d, ladder, spec.level, **kw)
    if spec.kind == "sparse_linucb":
        if spec.dist == "uniform":
            dist = uniform_distribution(ladder.n_levels)
        elif spec.dist == "theory":
            dist = theory_distribution(spec.c_param, ladder.n_levels)
        elif spec.dist == "known":
            dist = point_mass(known_level(sparsity, ladder.n_levels),
                              ladder.n_levels)
        else:
            dist = point_mass(spec.level, ladder.n_levels)
        return SparseLinUcbPolicy(config.d, ladder, dist, **kw)
    if spec.kind == "ada_linucb":
        if spec.prior == "theory":
            prior = theory_distribution(spec.c_param, ladder.n_levels).probs
        else:
            prior = np.full(ladder.n_levels, 1.0 / ladder.n_levels)
        exp3 = Exp3State(prior=prior, eta=spec.eta, explore_q=spec.explore_q)
        return AdaLinUcbPolicy(config.d, ladder, exp3, **kw)
    raise ValueError(f"unknown policy kind {spec.kind!r}")


def run_episode(instance: BanditInstance, policy: BanditPolicy, horizon: int,
                policy_rng: np.random.Generator,
                noise_rng: np.random.Generator,
                label: str = "", seed: int = 0) -> RegretTrace:
    """Play one seeded episode of ``horizon`` rounds and record per-round
    pseudo-regret and chosen levels."""
    inst = np.empty(horizon)
    levels = np.empty(horizon, dtype=np.int64)
    history: List[RoundRecord] = []
    theta = instance.theta_star
    t0 = time.perf_counter()
    for t in range(1, horizon + 1):
        actions = instance.provider.next_set(history)
        try:
            choice = policy.choose(actions, t, policy_rng)
            values = actions @ theta
            x = float(values[choice.index]) + noise_draw(instance, noise_rng)
            policy.update(x)
        except Exception as exc:
            raise type(exc)(f"{exc} (round t={t})") from exc
        inst[t - 1] = max(float(values.max() - values[choice.index]), 0.0)
        levels[t - 1] = choice.level
        history.append(RoundRecord(actions, choice.index, x))
    return RegretTrace(label=label, seed=seed, instantaneous=inst,
                       cumulative=np.cumsum(inst), levels=levels,
                       wall_seconds=time.perf_counter() - t0)


def aggregate(traces: List[RegretTrace]) -> AggregateResult:
    """Pointwise mean and population standard deviation of the cumulative
    regret across repetitions."""
    if not traces:
        raise ValueError("no traces to aggregate")
    label = traces[0].label
    length = traces[0].cumulative.size
    if any(t.label != label or t.cumulative.size != length for t in traces):
        raise ValueError("traces have mixed labels or lengths")
    stack = np.stack([t.cumulative for t in traces])
    return AggregateResult(label=label, mean=stack.mean(axis=0),
                           std=stack.std(axis=0), repetitions=len(traces))


def run_sparsity_experiment(config: ExperimentConfig, sparsity: int):
    """All repetitions for one sparsity level. Every roster policy plays the
    same instance within a repetition; noise streams are independent per
    policy unless shared_noise is set.

    Returns (traces, aggregates) with traces ordered by (roster order, rep).
    """
    traces: dict = {spec.label: [] for spec in config.policies}
    for rep in range(config.repetitions):
        inst_rng = _rng(config.base_seed, _STREAM_INSTANCE, sparsity, rep)
        instance = generate_fixed_sphere_instance(
            config.d, config.k_actions, sparsity, inst_rng,
            noise=config.noise, sigma=config.sigma)
        for spec in config.policies:
            key = _label_key(spec.label)
            policy_rng = _rng(config.base_seed, _STREAM_POLICY, sparsity,
                              rep, key)
            if config.shared_noise:
                noise_rng = _rng(config.base_seed, _STREAM_NOISE_SHARED,
                                 sparsity, rep)
            else:
                noise_rng = _rng(config.base_seed, _STREAM_NOISE, sparsity,
                                 rep, key)
            policy = build_policy(spec, config, sparsity)
            traces[spec.label].append(
                run_episode(instance, policy, config.horizon, policy_rng,
                            noise_rng, label=spec.label, seed=rep))
    flat = [tr for spec in config.policies for tr in traces[spec.label]]
    aggs = [aggregate(traces[spec.label]) for spec in config.policies]
    return flat, aggs


def run_experiment(config: ExperimentConfig):
    """Run every configured sparsity level; returns
    {sparsity: (traces, aggregates)}."""
    return {s: run_sparsity_experiment(config, s) for s in config.sparsity}
