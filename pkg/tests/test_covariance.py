import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparseucb.covariance import CovarianceState
from sparseucb.errors import CorruptionError


def random_unit(rng, d):
    g = rng.standard_normal(d)
    return g / np.linalg.norm(g)


def test_fresh_state_initialization():
    s = CovarianceState(3)
    assert np.array_equal(s.v, np.eye(3))
    assert np.array_equal(s.v_inv, np.eye(3))
    assert s.log_det == 0.0
    assert np.array_equal(s.b, np.zeros(3))
    assert np.array_equal(s.theta_hat, np.zeros(3))
    assert s.step == 0


def test_rank_one_update_1d_closed_form():
    s = CovarianceState(1)
    s.rank_one_update([1.0])
    assert s.v[0, 0] == pytest.approx(2.0)
    assert s.v_inv[0, 0] == pytest.approx(0.5)
    assert s.log_det == pytest.approx(np.log(2.0))


def test_rank_one_update_zero_vector_only_steps():
    s = CovarianceState(3)
    s.rank_one_update(np.zeros(3))
    assert s.step == 1
    assert np.array_equal(s.v, np.eye(3))
    assert s.log_det == 0.0


def test_maintained_inverse_matches_direct_inversion():
    rng = np.random.default_rng(7)
    s = CovarianceState(8, refresh_period=10 ** 9)
    for _ in range(1000):
        s.rank_one_update(random_unit(rng, 8))
    direct = np.linalg.inv(s.v)
    assert np.max(np.abs(s.v_inv - direct)) <= 1e-8


def test_rank_one_update_rejects_bad_input():
    s = CovarianceState(2)
    with pytest.raises(ValueError):
        s.rank_one_update([np.nan, 0.0])
    with pytest.raises(ValueError):
        s.rank_one_update([2.0, 0.0])
    with pytest.raises(ValueError):
        s.rank_one_update([1.0, 0.0, 0.0])


def test_mahalanobis_identity_metric():
    s = CovarianceState(4)
    e = np.zeros(4)
    e[1] = 1.0
    assert s.mahalanobis_norm(e) == pytest.approx(1.0)
    assert s.mahalanobis_norm(np.zeros(4)) == 0.0


def test_mahalanobis_matches_linear_solve():
    rng = np.random.default_rng(11)
    s = CovarianceState(4)
    for _ in range(50):
        s.rank_one_update(random_unit(rng, 4))
    a = random_unit(rng, 4)
    oracle = float(np.sqrt(a @ np.linalg.solve(s.v, a)))
    assert s.mahalanobis_norm(a) == pytest.approx(oracle, abs=1e-9)


def test_mahalanobis_corruption_detection():
    s = CovarianceState(2)
    s.v_inv = -np.eye(2)  # deliberately corrupt
    with pytest.raises(CorruptionError):
        s.mahalanobis_norm(np.array([1.0, 0.0]))


def test_rls_fresh_state_zero_estimate():
    s = CovarianceState(5)
    assert np.array_equal(s.theta_hat, np.zeros(5))


def test_rls_1d_minimizer():
    # theta_hat minimizes theta^2 + (1 - theta)^2, i.e. 0.5
    s = CovarianceState(1)
    s.rank_one_update([1.0])
    s.rls_update([1.0], 1.0)
    assert s.theta_hat[0] == pytest.approx(0.5)


def test_rls_matches_direct_solve():
    rng = np.random.default_rng(3)
    d = 5
    s = CovarianceState(d)
    history = []
    for _ in range(30):
        a = random_unit(rng, d)
        x = rng.normal()
        s.rank_one_update(a)
        s.rls_update(a, x)
        history.append((a, x))
    gram = np.eye(d) + sum(np.outer(a, a) for a, _ in history)
    rhs = sum(x * a for a, x in history)
    assert np.max(np.abs(s.theta_hat - np.linalg.solve(gram, rhs))) <= 1e-8


def test_rls_rejects_nonfinite_prediction():
    s = CovarianceState(2)
    s.rank_one_update([1.0, 0.0])
    with pytest.raises(ValueError):
        s.rls_update([1.0, 0.0], float("inf"))


def test_refresh_noop_on_fresh_state():
    s = CovarianceState(3)
    s.refresh()
    assert np.allclose(s.v_inv, np.eye(3))
    assert s.log_det == 0.0


def test_refresh_agrees_with_maintained_inverse():
    rng = np.random.default_rng(5)
    s = CovarianceState(6, refresh_period=10 ** 9)
    for _ in range(10):
        s.rank_one_update(random_unit(rng, 6))
    before = s.v_inv.copy()
    s.refresh()
    assert np.max(np.abs(before - s.v_inv)) <= 1e-8
    assert s.updates_since_refresh == 0


def test_refresh_log_det_matches_eigenvalues():
    rng = np.random.default_rng(9)
    s = CovarianceState(6)
    for _ in range(40):
        s.rank_one_update(random_unit(rng, 6))
    s.refresh()
    eig = np.linalg.eigvalsh(s.v)
    assert s.log_det == pytest.approx(float(np.sum(np.log(eig))), abs=1e-8)


def test_periodic_refresh_triggers():
    rng = np.random.default_rng(13)
    s = CovarianceState(3, refresh_period=10)
    for _ in range(25):
        s.rank_one_update(random_unit(rng, 3))
    assert s.updates_since_refresh == 5


def test_drift_bound_over_long_run():
    rng = np.random.default_rng(17)
    s = CovarianceState(8)  # default refresh period
    for _ in range(3000):
        s.rank_one_update(random_unit(rng, 8))
    assert np.max(np.abs(s.v @ s.v_inv - np.eye(8))) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6), d=st.sampled_from([1, 2, 3, 6]),
       n_updates=st.integers(1, 60))
def test_det_ratio_identity(seed, d, n_updates):
    # log det(V_t) - log det(V_{t-1}) == log(1 + ||a||^2_{V_{t-1}^{-1}})
    rng = np.random.default_rng(seed)
    s = CovarianceState(d, refresh_period=10 ** 9)
    for _ in range(n_updates):
        a = random_unit(rng, d) * rng.uniform(0.0, 1.0)
        norm_sq = s.mahalanobis_norm(a) ** 2
        before = s.log_det
        s.rank_one_update(a)
        assert abs((s.log_det - before) - np.log1p(norm_sq)) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6), d=st.sampled_from([2, 4, 8]),
       n_updates=st.integers(1, 150))
def test_elliptic_potential_bound(seed, d, n_updates):
    rng = np.random.default_rng(seed)
    s = CovarianceState(d)
    potential = 0.0
    for _ in range(n_updates):
        a = random_unit(rng, d)
        potential += min(1.0, s.mahalanobis_norm(a) ** 2)
        s.rank_one_update(a)
    assert potential <= 2.0 * s.log_det + 1e-6


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6), d=st.sampled_from([2, 5]),
       n_updates=st.integers(1, 200))
def test_determinant_trace_bound(seed, d, n_updates):
    rng = np.random.default_rng(seed)
    s = CovarianceState(d)
    for _ in range(n_updates):
        s.rank_one_update(random_unit(rng, d) * rng.uniform(0.0, 1.0))
    assert s.log_det <= d * np.log(1.0 + n_updates / d) + 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_ellipsoid_algebraic_identity(seed):
    # The regularized squared loss at any theta decomposes into its value at
    # theta_hat plus the V-weighted squared distance to theta_hat.
    rng = np.random.default_rng(seed)
    d = 4
    s = CovarianceState(d)
    history = []
    for _ in range(25):
        a = random_unit(rng, d)
        x_hat = rng.normal()
        s.rank_one_update(a)
        s.rls_update(a, x_hat)
        history.append((a, x_hat))
    theta = rng.standard_normal(d)
    lhs = theta @ theta + sum((x - theta @ a) ** 2 for a, x in history)
    diff = theta - s.theta_hat
    rhs = (diff @ s.v @ diff + s.theta_hat @ s.theta_hat
           + sum((x - s.theta_hat @ a) ** 2 for a, x in history))
    assert lhs == pytest.approx(rhs, rel=1e-6)
