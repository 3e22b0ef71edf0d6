"""Pluggable online regressors producing the per-round prediction that feeds
the regularized least-squares update.

The round protocol is predict-then-observe. ``feed`` bundles both for the
policy loop: predict the reward of the chosen action, then learn from the
realized reward, returning the prediction.
"""

from __future__ import annotations

import numpy as np

from .covariance import CovarianceState
from .errors import ProtocolError


def passthrough_predict(a, pending_reward: float) -> float:
    """Identity substitution: the prediction is the realized reward itself."""
    return pending_reward


class OnlineRegressor:
    """Protocol base. Subclasses implement predict/observe; predict must be
    deterministic given the observation history, and observe/predict strictly
    alternate within a round."""

    def predict(self, a) -> float:
        raise NotImplementedError

    def observe(self, a, x: float) -> None:
        raise NotImplementedError

    def feed(self, a, x: float) -> float:
        x_hat = self.predict(a)
        self.observe(a, x)
        return x_hat


class PassthroughRegressor(OnlineRegressor):
    """Returns the realized reward as its prediction (zero online loss).

    This reorders the usual protocol: the reward must be known before feed is
    called, which the episode loop guarantees.
    """

    def feed(self, a, x: float) -> float:
        return passthrough_predict(a, x)


class RidgeRegressor(OnlineRegressor):
    """Online ridge regression with unit regularizer; predictions are clipped
    to [-clip_bound, clip_bound] (default 1 + noise bound)."""

    def __init__(self, dim: int, clip_bound: float = 2.0):
        if clip_bound <= 0.0:
            raise ValueError("clip_bound must be positive")
        self._cov = CovarianceState(dim)
        self.clip_bound = clip_bound
        self._awaiting_observe = False

    def predict(self, a) -> float:
        if self._awaiting_observe:
            raise ProtocolError("predict called twice without observe")
        a = np.asarray(a, dtype=float)
        self._awaiting_observe = True
        raw = float(self._cov.theta_hat @ a)
        return float(np.clip(raw, -self.clip_bound, self.clip_bound))

    def observe(self, a, x: float) -> None:
        if not self._awaiting_observe:
            raise ProtocolError("observe called before predict")
        self._cov.rank_one_update(a)
        self._cov.rls_update(a, x)
        self._awaiting_observe = False
