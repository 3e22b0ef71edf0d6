"""Regularized design matrix V_t = I + sum_s A_s A_s^T with maintained inverse,
log-determinant and the regularized least-squares estimate.

The inverse is maintained with the rank-one inverse-update formula and
recomputed exactly from a Cholesky factorization every ``refresh_period``
updates to bound floating-point drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import CorruptionError

# Tolerances for input/state sanity. Tiny negative quadratic forms are
# roundoff and clamp to zero; anything below NEG_QUAD_TOL means the
# maintained inverse is corrupt.
NORM_SLACK = 1e-9
NEG_QUAD_TOL = -1e-12
DEFAULT_REFRESH_PERIOD = 1000


@dataclass
class CovarianceState:
    """Mutable per-episode linear-algebra state.

    At step 0: v = I, v_inv = I, log_det = 0, b = 0, theta_hat = 0.
    """

    dim: int
    refresh_period: int = DEFAULT_REFRESH_PERIOD
    v: np.ndarray = field(init=False)
    v_inv: np.ndarray = field(init=False)
    log_det: float = field(init=False, default=0.0)
    b: np.ndarray = field(init=False)
    theta_hat: np.ndarray = field(init=False)
    step: int = field(init=False, default=0)
    updates_since_refresh: int = field(init=False, default=0)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if self.refresh_period < 1:
            raise ValueError("refresh_period must be a positive integer")
        self.v = np.eye(self.dim)
        self.v_inv = np.eye(self.dim)
        self.b = np.zeros(self.dim)
        self.theta_hat = np.zeros(self.dim)

    def _check_vector(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim,):
            raise ValueError(f"expected vector of shape ({self.dim},), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("vector has non-finite entries")
        return a

    def rank_one_update(self, a) -> "CovarianceState":
        """v += a a^T, with inverse, log-determinant and step bookkeeping.

        Requires ||a||_2 <= 1 (up to slack). The log-det increment is
        log(1 + a^T v_inv a) evaluated with the pre-update inverse.
        """
        a = self._check_vector(a)
        if a @ a > (1.0 + NORM_SLACK) ** 2:
            raise ValueError("action norm exceeds 1")
        va = self.v_inv @ a
        quad = float(a @ va)
        if 1.0 + quad <= 0.0:
            raise CorruptionError("1 + a^T V^-1 a <= 0: inverse is corrupt")
        self.v += np.outer(a, a)
        self.v_inv -= np.outer(va, va) / (1.0 + quad)
        self.log_det += np.log1p(quad)
        self.step += 1
        self.updates_since_refresh += 1
        if self.updates_since_refresh >= self.refresh_period:
            self.refresh()
        return self

    def mahalanobis_norm(self, a) -> float:
        """sqrt(a^T v_inv a), clamping tiny negative roundoff to 0."""
        a = self._check_vector(a)
        quad = float(a @ self.v_inv @ a)
        if quad < NEG_QUAD_TOL:
            raise CorruptionError(f"quadratic form {quad} < {NEG_QUAD_TOL}")
        return float(np.sqrt(max(quad, 0.0)))

    def mahalanobis_norms(self, actions: np.ndarray) -> np.ndarray:
        """Row-wise Mahalanobis norms for a (K, d) action matrix."""
        quad = np.einsum("ij,jk,ik->i", actions, self.v_inv, actions)
        if np.any(quad < NEG_QUAD_TOL):
            raise CorruptionError("negative quadratic form beyond roundoff")
        return np.sqrt(np.maximum(quad, 0.0))

    def rls_update(self, a, x_hat: float) -> "CovarianceState":
        """Accumulate b += x_hat * a and recompute theta_hat = v_inv b.

        Must be called after rank_one_update(a) for the same round, so that
        theta_hat minimizes ||theta||^2 + sum_s (x_hat_s - <theta, a_s>)^2.
        """
        a = self._check_vector(a)
        if not np.isfinite(x_hat):
            raise ValueError("non-finite prediction")
        self.b += x_hat * a
        self.theta_hat = self.v_inv @ self.b
        return self

    def refresh(self) -> "CovarianceState":
        """Recompute v_inv and log_det exactly from a Cholesky factor of v."""
        try:
            cho = scipy.linalg.cho_factor(self.v, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise CorruptionError("Gram matrix is numerically non-PD") from exc
        v_inv = scipy.linalg.cho_solve(cho, np.eye(self.dim))
        self.v_inv = 0.5 * (v_inv + v_inv.T)
        self.log_det = float(2.0 * np.sum(np.log(np.diag(cho[0]))))
        self.theta_hat = self.v_inv @ self.b
        self.updates_since_refresh = 0
        return self
