"""The bandit policies: optimism with a fixed log-det radius (OFUL), greedy,
the multi-level randomized policy (SparseLinUCB) and its Exp3-driven variant
(AdaLinUCB), plus the level-selection machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .confidence import RadiusLadder
from .covariance import CovarianceState, DEFAULT_REFRESH_PERIOD, NORM_SLACK
from .errors import ProtocolError
from .regressors import OnlineRegressor, PassthroughRegressor

TIE_TOL = 1e-12


# ---------------------------------------------------------------------------
# Level-selection distributions

@dataclass(frozen=True)
class SelectionDistribution:
    """Fixed categorical distribution over ladder levels."""

    probs: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a nonempty vector")
        if np.any(p < 0.0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be nonnegative and sum to 1")
        object.__setattr__(self, "probs", p)

    @property
    def n_levels(self) -> int:
        return self.probs.size


def uniform_distribution(n_levels: int) -> SelectionDistribution:
    return SelectionDistribution(np.full(n_levels, 1.0 / n_levels), kind="uniform")


def point_mass(level: int, n_levels: int) -> SelectionDistribution:
    if not 0 <= level < n_levels:
        raise ValueError("level out of range")
    p = np.zeros(n_levels)
    p[level] = 1.0
    return SelectionDistribution(p, kind="point")


def theory_distribution(c_param: float, n_levels: int) -> SelectionDistribution:
    """Geometric level distribution q_s = C^2 2^{-s} (s = 1..n) where that is
    below 1; levels where it is not share the remaining mass equally. The
    result is renormalized to sum exactly 1.
    """
    if c_param < 1.0:
        raise ValueError("c_param must be >= 1")
    raw = c_param ** 2 * 2.0 ** -np.arange(1, n_levels + 1)
    capped = raw >= 1.0
    p = np.where(capped, 0.0, raw)
    n_capped = int(capped.sum())
    if n_capped > 0:
        p[capped] = max(1.0 - p.sum(), 0.0) / n_capped
    p /= p.sum()
    return SelectionDistribution(p, kind="theory")


def sample_level(dist: SelectionDistribution, rng: np.random.Generator) -> int:
    """Inverse-CDF categorical draw consuming exactly one uniform variate."""
    u = rng.random()
    cdf = np.cumsum(dist.probs)
    return min(int(np.searchsorted(cdf, u, side="right")), dist.n_levels - 1)


# ---------------------------------------------------------------------------
# Exp3 over levels

@dataclass
class Exp3State:
    """Exponential-weights state over ladder levels.

    cumulative holds the running negated importance-weighted loss estimates;
    eta None means the time-varying rate 2 sqrt(log n / (n t)).
    """

    prior: np.ndarray
    eta: Optional[float] = None
    explore_q: float = 0.0
    cumulative: np.ndarray = field(init=False)

    def __post_init__(self):
        self.prior = np.asarray(self.prior, dtype=float)
        if self.prior.ndim != 1 or self.prior.size == 0:
            raise ValueError("prior must be a nonempty vector")
        if np.any(self.prior < 0.0):
            raise ValueError("prior entries must be nonnegative")
        if not 0.0 <= self.explore_q <= 1.0:
            raise ValueError("explore_q must lie in [0, 1]")
        self.cumulative = np.zeros(self.prior.size)

    @property
    def n_levels(self) -> int:
        return self.prior.size

    def rate(self, t: int) -> float:
        if self.eta is not None:
            return self.eta
        n = self.n_levels
        return 2.0 * math.sqrt(math.log(n) / (n * t))


def exp3_probs(exp3: Exp3State, t: int) -> np.ndarray:
    """Prior-weighted softmax P_i proportional to prior_i exp(eta_t S_i),
    stabilized by subtracting the largest exponent."""
    if exp3.prior.sum() <= 0.0:
        raise ValueError("prior has no mass")
    z = exp3.rate(t) * exp3.cumulative
    w = exp3.prior * np.exp(z - z.max())
    return w / w.sum()


def exp3_update(exp3: Exp3State, chosen: int, reward: float,
                p_chosen: float) -> Exp3State:
    """Importance-weighted loss update: the chosen level's cumulative entry
    decreases by clip((2 - reward)/4, 0, 1) / p_chosen."""
    if p_chosen <= 0.0:
        raise ValueError("p_chosen must be positive")
    if not 0 <= chosen < exp3.n_levels:
        raise ValueError("chosen level out of range")
    loss = min(max((2.0 - reward) / 4.0, 0.0), 1.0)
    exp3.cumulative[chosen] -= loss / p_chosen
    return exp3


# ---------------------------------------------------------------------------
# Action selection

def _as_action_matrix(actions) -> np.ndarray:
    a = np.asarray(actions, dtype=float)
    if a.ndim != 2 or a.shape[0] == 0:
        raise ValueError("actions must be a nonempty (K, d) matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("actions contain non-finite entries")
    if np.any(np.einsum("ij,ij->i", a, a) > (1.0 + NORM_SLACK) ** 2):
        raise ValueError("some action norm exceeds 1")
    return a


def ucb_argmax(actions, state: CovarianceState, alpha: float):
    """Maximizer of <a, theta_hat> + sqrt(alpha) ||a||_{V^-1}. Ties (scores
    within 1e-12 of the max) break to the lowest index."""
    a = _as_action_matrix(actions)
    scores = a @ state.theta_hat
    if alpha > 0.0:
        scores = scores + math.sqrt(alpha) * state.mahalanobis_norms(a)
    idx = int(np.argmax(scores >= scores.max() - TIE_TOL))
    return idx, a[idx]


# ---------------------------------------------------------------------------
# Policies

@dataclass(frozen=True)
class Choice:
    index: int
    action: np.ndarray
    level: int  # -1 for policies without a level notion


class BanditPolicy:
    """Common round protocol: choose(actions, t, rng) then update(reward).

    After the reward arrives the policy performs, in order: the Gram-matrix
    rank-one update, the regressor feed producing the prediction, and the
    regularized least-squares update.
    """

    def __init__(self, dim: int, regressor: Optional[OnlineRegressor] = None,
                 refresh_period: int = DEFAULT_REFRESH_PERIOD):
        self.cov = CovarianceState(dim, refresh_period=refresh_period)
        self.regressor = regressor if regressor is not None else PassthroughRegressor()
        self._pending: Optional[Choice] = None

    def _alpha(self, t: int, rng: np.random.Generator) -> tuple[float, int]:
        raise NotImplementedError

    def choose(self, actions, t: int, rng: np.random.Generator) -> Choice:
        if self._pending is not None:
            raise ProtocolError("choose called before the previous reward arrived")
        alpha, level = self._alpha(t, rng)
        idx, a = ucb_argmax(actions, self.cov, alpha)
        self._pending = Choice(idx, a, level)
        return self._pending

    def update(self, reward: float) -> None:
        if self._pending is None:
            raise ProtocolError("reward supplied before an action was chosen")
        a = self._pending.action
        self.cov.rank_one_update(a)
        x_hat = self.regressor.feed(a, reward)
        self.cov.rls_update(a, x_hat)
        self._post_update(reward)
        self._pending = None

    def _post_update(self, reward: float) -> None:
        pass


class OfulPolicy(BanditPolicy):
    """Optimism with the log-determinant radius
    sqrt(gamma_t) = sqrt(2 log T + log det V_{t-1}) + 1 (unit regularizer,
    confidence 1/T)."""

    def __init__(self, dim: int, horizon: int, **kw):
        super().__init__(dim, **kw)
        self.horizon = horizon

    def _alpha(self, t, rng):
        root = math.sqrt(2.0 * math.log(self.horizon) + self.cov.log_det) + 1.0
        return root * root, -1


class GreedyPolicy(BanditPolicy):
    """Pure exploitation: always plays argmax <a, theta_hat>."""

    def _alpha(self, t, rng):
        return 0.0, -1


class FixedLevelPolicy(BanditPolicy):
    """Plays a single ladder level every round (no randomness)."""

    def __init__(self, dim: int, ladder: RadiusLadder, level: int, **kw):
        super().__init__(dim, **kw)
        self.ladder = ladder
        self.level = level

    def _alpha(self, t, rng):
        return self.ladder.radius(self.level, t), self.level


class SparseLinUcbPolicy(BanditPolicy):
    """Draws a ladder level from a fixed distribution each round and plays
    the optimistic action for that level's radius."""

    def __init__(self, dim: int, ladder: RadiusLadder,
                 dist: SelectionDistribution, **kw):
        super().__init__(dim, **kw)
        if dist.n_levels != ladder.n_levels:
            raise ValueError("distribution and ladder level counts differ")
        self.ladder = ladder
        self.dist = dist

    def _alpha(self, t, rng):
        level = sample_level(self.dist, rng)
        return self.ladder.radius(level, t), level


class AdaLinUcbPolicy(BanditPolicy):
    """Selects the level by Exp3 with optional forced exploration: with
    probability explore_q the top-radius optimistic action is played and the
    Exp3 state is left untouched; otherwise the level is drawn from the
    prior-weighted softmax and the importance-weighted loss update runs after
    the reward arrives."""

    def __init__(self, dim: int, ladder: RadiusLadder, exp3: Exp3State, **kw):
        super().__init__(dim, **kw)
        if exp3.n_levels != ladder.n_levels:
            raise ValueError("Exp3 state and ladder level counts differ")
        self.ladder = ladder
        self.exp3 = exp3
        self._pending_prob: Optional[float] = None

    def _alpha(self, t, rng):
        forced = rng.random() < self.exp3.explore_q
        if forced:
            self._pending_prob = None
            level = self.ladder.top_level
        else:
            probs = exp3_probs(self.exp3, t)
            level = sample_level(SelectionDistribution(probs), rng)
            self._pending_prob = float(probs[level])
        return self.ladder.radius(level, t), level

    def _post_update(self, reward):
        if self._pending_prob is not None:
            exp3_update(self.exp3, self._pending.level, reward, self._pending_prob)
            self._pending_prob = None
