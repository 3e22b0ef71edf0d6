"""Bandit instances: action-set providers (adaptive-adversary contract),
hidden sparse targets, noise models, reward generation and pseudo-regret.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

NORM_SLACK = 1e-12


@dataclass(frozen=True)
class RoundRecord:
    """One entry of the observable transcript an adaptive provider may use."""

    action_set: np.ndarray
    chosen_index: int
    reward: float


class ActionSetProvider:
    """Contract: next_set(history) returns a nonempty (K, d) matrix of
    actions with norms <= 1. The history is the full observable transcript,
    so a provider may adapt arbitrarily to the learner's past behavior."""

    def next_set(self, history: List[RoundRecord]) -> np.ndarray:
        raise NotImplementedError


class FixedSetProvider(ActionSetProvider):
    """Emits the same action set every round, ignoring the transcript."""

    def __init__(self, actions: np.ndarray):
        actions = np.asarray(actions, dtype=float)
        if actions.ndim != 2 or actions.shape[0] == 0:
            raise ValueError("actions must be a nonempty (K, d) matrix")
        if np.any(np.einsum("ij,ij->i", actions, actions) > (1.0 + NORM_SLACK) ** 2):
            raise ValueError("some action norm exceeds 1")
        self.actions = actions

    def next_set(self, history):
        return self.actions


@dataclass
class BanditInstance:
    """Hidden target, action-set source and noise model for one episode."""

    theta_star: np.ndarray
    provider: ActionSetProvider
    noise: str = "uniform"  # uniform | gaussian | none
    sigma: float = 1.0

    def __post_init__(self):
        self.theta_star = np.asarray(self.theta_star, dtype=float)
        if self.theta_star @ self.theta_star > (1.0 + NORM_SLACK) ** 2:
            raise ValueError("target norm exceeds 1")
        if self.noise not in ("uniform", "gaussian", "none"):
            raise ValueError(f"unknown noise model {self.noise!r}")

    @property
    def dim(self) -> int:
        return self.theta_star.size


def sample_sphere(dim: int, rng: np.random.Generator, size: Optional[int] = None):
    """Uniform points on the unit sphere via normalized standard normals."""
    if size is None:
        g = rng.standard_normal(dim)
        return g / np.linalg.norm(g)
    g = rng.standard_normal((size, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def generate_fixed_sphere_instance(d: int, k_actions: int, sparsity: int,
                                   rng: np.random.Generator,
                                   noise: str = "uniform",
                                   sigma: float = 1.0) -> BanditInstance:
    """K actions drawn i.i.d. from the unit sphere and fixed for all rounds;
    the target has its first ``sparsity`` coordinates on the unit sphere of
    that dimension and the rest zero."""
    if not 1 <= sparsity <= d:
        raise ValueError(f"sparsity must lie in [1, {d}], got {sparsity}")
    if k_actions < 1:
        raise ValueError("k_actions must be positive")
    actions = sample_sphere(d, rng, size=k_actions)
    theta = np.zeros(d)
    theta[:sparsity] = sample_sphere(sparsity, rng)
    return BanditInstance(theta_star=theta, provider=FixedSetProvider(actions),
                          noise=noise, sigma=sigma)


def noise_draw(instance: BanditInstance, rng: np.random.Generator) -> float:
    if instance.noise == "uniform":
        return rng.uniform(-1.0, 1.0)
    if instance.noise == "gaussian":
        return instance.sigma * rng.standard_normal()
    return 0.0


def reward(instance: BanditInstance, a, rng: np.random.Generator) -> float:
    """<a, theta_star> plus one noise draw."""
    return float(np.asarray(a, dtype=float) @ instance.theta_star
                 + noise_draw(instance, rng))


def instantaneous_regret(instance: BanditInstance, action_set, chosen) -> float:
    """Pseudo-regret of one round: best expected reward in the set minus the
    chosen action's expected reward (clamped at 0 against roundoff)."""
    action_set = np.asarray(action_set, dtype=float)
    chosen = np.asarray(chosen, dtype=float)
    if not np.any(np.all(action_set == chosen, axis=1)):
        raise ValueError("chosen action is not a member of the action set")
    values = action_set @ instance.theta_star
    gap = float(values.max() - chosen @ instance.theta_star)
    return max(gap, 0.0)


def min_gap(instance: BanditInstance, horizon: int = 1) -> Optional[float]:
    """Minimum suboptimality gap over the (fixed) action set, or None when
    two actions tie for optimal (the gap is undefined, not an error)."""
    values = instance.provider.next_set([]) @ instance.theta_star
    if values.size < 2:
        return None
    order = np.sort(values)[::-1]
    gap = float(order[0] - order[1])
    if gap == 0.0:
        return None
    return gap
