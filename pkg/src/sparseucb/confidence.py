"""Confidence-set radii: the geometric radius ladder, the online-to-confidence-set
conversion radius, the sparse-regression regret-bound formula and the safe index.

Natural log throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import LadderTooShortError


class LadderMode(Enum):
    FIXED_HORIZON = "fixed_horizon"    # radius(i) = 2^i * log(T)
    TIME_DEPENDENT = "time_dependent"  # radius(i, t) = 2^i * log(t), level 0 greedy


@dataclass(frozen=True)
class RadiusLadder:
    """Geometric schedule of squared confidence radii over n_levels levels.

    Levels are indexed 0 .. n_levels-1. In TIME_DEPENDENT mode with
    include_greedy_level, level 0 has radius 0 (pure exploitation) and level
    i >= 1 has radius 2^i log t. In FIXED_HORIZON mode level i has radius
    2^i log T for every i.
    """

    n_levels: int
    mode: LadderMode
    horizon: int
    include_greedy_level: bool = False

    def __post_init__(self):
        if self.n_levels < 1:
            raise ValueError("n_levels must be positive")
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.include_greedy_level and self.mode is LadderMode.FIXED_HORIZON:
            raise ValueError("greedy level is only defined in time-dependent mode")

    @property
    def top_level(self) -> int:
        return self.n_levels - 1

    def radius(self, level: int, t: int) -> float:
        """Squared confidence radius of the given level at round t (1-based)."""
        if not 0 <= level < self.n_levels:
            raise ValueError(f"level {level} out of range [0, {self.n_levels})")
        if t < 1:
            raise ValueError("t must be >= 1")
        if self.mode is LadderMode.FIXED_HORIZON:
            return 2.0 ** level * math.log(self.horizon)
        if self.include_greedy_level and level == 0:
            return 0.0
        return 2.0 ** level * math.log(t)


@dataclass(frozen=True)
class ConversionParams:
    """Inputs of the conversion radius: an online-regression regret bound b_t,
    a confidence parameter delta in (0, 1/4], and the universal constant of
    the sparse regret-bound formula (unspecified in theory; default 1)."""

    b_t: float
    delta: float
    t_horizon: int
    c_universal: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.delta <= 0.25:
            raise ValueError("delta must lie in (0, 1/4]")
        if not (self.b_t >= 0.0 and math.isfinite(self.b_t)):
            raise ValueError("b_t must be finite and nonnegative")
        if self.c_universal <= 0.0:
            raise ValueError("c_universal must be positive")


def gamma_delta(params: ConversionParams) -> float:
    """Squared radius of the converted confidence set:

        gamma(delta) = 2 + 2 B_T + 32 log((sqrt(8) + sqrt(1 + B_T)) / delta)

    Strictly increasing in B_T, strictly decreasing in delta.
    """
    b = params.b_t
    return 2.0 + 2.0 * b + 32.0 * math.log(
        (math.sqrt(8.0) + math.sqrt(1.0 + b)) / params.delta
    )


def seqsew_regret_bound(l0: int, l1: float, t_horizon: int,
                        c_universal: float = 1.0) -> float:
    """Sparse online-regression regret bound as a formula:

        B_T = c * l0 * { log(e + sqrt(T)) + C_T * log(1 + l1/l0) }
        C_T = 2 + log2(log(e + sqrt(T)))

    where l0, l1 are the comparator's 0- and 1-norms.
    """
    if l0 < 1:
        raise ValueError("l0 must be >= 1")
    if l1 < 0.0:
        raise ValueError("l1 must be nonnegative")
    if t_horizon < 1:
        raise ValueError("t_horizon must be positive")
    if c_universal <= 0.0:
        raise ValueError("c_universal must be positive")
    inner = math.log(math.e + math.sqrt(t_horizon))
    c_t = 2.0 + math.log2(inner)
    return c_universal * l0 * (inner + c_t * math.log1p(l1 / l0))


def safe_index(ladder: RadiusLadder, gamma: float) -> int:
    """Smallest level i >= 1 of a fixed-horizon ladder with radius(i) >= gamma
    (inclusive comparison)."""
    if ladder.mode is not LadderMode.FIXED_HORIZON:
        raise ValueError("safe_index is defined for fixed-horizon ladders only")
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    for level in range(1, ladder.n_levels):
        if gamma <= ladder.radius(level, 1):
            return level
    raise LadderTooShortError(
        f"gamma={gamma} exceeds top radius {ladder.radius(ladder.top_level, 1)}"
    )


def sized_fixed_horizon_ladder(dim: int, gamma: float, horizon: int) -> RadiusLadder:
    """Fixed-horizon ladder sized so the top radius dominates gamma and the
    number of levels is at least ceil(log2 d) + 3 (Theta(log d) levels)."""
    if dim < 1:
        raise ValueError("dim must be positive")
    n = max(math.ceil(math.log2(dim)) + 3, 1)
    while 2.0 ** n * math.log(horizon) < gamma:
        n += 1
    return RadiusLadder(n_levels=n + 1, mode=LadderMode.FIXED_HORIZON,
                        horizon=horizon)
