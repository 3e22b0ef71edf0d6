import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparseucb.environment import (BanditInstance, FixedSetProvider,
                                   RoundRecord, generate_fixed_sphere_instance,
                                   instantaneous_regret, min_gap, reward)


def test_1d_sphere_is_sign():
    rng = np.random.default_rng(0)
    inst = generate_fixed_sphere_instance(1, 1, 1, rng)
    assert abs(inst.theta_star[0]) == pytest.approx(1.0)
    assert abs(inst.provider.next_set([])[0, 0]) == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6), d=st.integers(1, 16))
def test_target_construction(seed, d):
    rng = np.random.default_rng(seed)
    s = rng.integers(1, d + 1)
    inst = generate_fixed_sphere_instance(d, 5, int(s), rng)
    assert np.linalg.norm(inst.theta_star) == pytest.approx(1.0, abs=1e-12)
    assert np.count_nonzero(inst.theta_star[s:]) == 0
    assert np.count_nonzero(inst.theta_star) == s  # zero coords a.s. only in tail


def test_sphere_actions_nearly_orthogonal_on_average():
    rng = np.random.default_rng(42)
    inst = generate_fixed_sphere_instance(16, 30, 16, rng)
    actions = inst.provider.next_set([])
    gram = actions @ actions.T
    off_diag = gram[np.triu_indices(30, k=1)]
    assert abs(off_diag.mean()) <= 0.1


def test_sparsity_bounds_rejected():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        generate_fixed_sphere_instance(4, 5, 5, rng)
    with pytest.raises(ValueError):
        generate_fixed_sphere_instance(4, 5, 0, rng)


def test_target_norm_validated():
    with pytest.raises(ValueError):
        BanditInstance(theta_star=np.array([1.0, 1.0]),
                       provider=FixedSetProvider(np.eye(2)))


def test_provider_norm_validated():
    with pytest.raises(ValueError):
        FixedSetProvider(np.array([[2.0, 0.0]]))


def test_reward_noiseless_orthogonal_and_aligned():
    theta = np.array([1.0, 0.0])
    inst = BanditInstance(theta_star=theta,
                          provider=FixedSetProvider(np.eye(2)), noise="none")
    rng = np.random.default_rng(0)
    assert reward(inst, np.array([0.0, 1.0]), rng) == 0.0
    assert reward(inst, theta, rng) == pytest.approx(1.0)


def test_reward_uniform_noise_concentrates():
    rng = np.random.default_rng(3)
    inst = generate_fixed_sphere_instance(4, 5, 2, rng)
    a = inst.provider.next_set([])[0]
    n = 10 ** 5
    draws = np.array([reward(inst, a, rng) for _ in range(n)])
    # Uniform[-1,1] noise has std 1/sqrt(3)
    tol = 3.0 / np.sqrt(3.0 * n)
    assert abs(draws.mean() - float(a @ inst.theta_star)) <= tol


def test_reward_noise_none_is_reproducible():
    rng = np.random.default_rng(1)
    inst = generate_fixed_sphere_instance(3, 4, 2, rng)
    inst.noise = "none"
    a = inst.provider.next_set([])[1]
    r1 = reward(inst, a, np.random.default_rng(9))
    r2 = reward(inst, a, np.random.default_rng(9))
    assert r1 == r2 == float(a @ inst.theta_star)


class TestInstantaneousRegret:
    def setup_method(self):
        self.inst = BanditInstance(
            theta_star=np.array([1.0, 0.0]),
            provider=FixedSetProvider(np.array([[0.9, 0.1], [0.4, 0.2]])),
            noise="none")
        self.actions = self.inst.provider.next_set([])

    def test_optimal_play_zero(self):
        assert instantaneous_regret(self.inst, self.actions,
                                    self.actions[0]) == 0.0

    def test_two_point_arithmetic(self):
        assert instantaneous_regret(self.inst, self.actions,
                                    self.actions[1]) == pytest.approx(0.5)

    def test_membership_enforced(self):
        with pytest.raises(ValueError):
            instantaneous_regret(self.inst, self.actions,
                                 np.array([0.0, 1.0]))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            inst = generate_fixed_sphere_instance(5, 8, 3, rng)
            actions = inst.provider.next_set([])
            values = actions @ inst.theta_star
            k = rng.integers(0, 8)
            expected = max(float(values.max() - values[k]), 0.0)
            got = instantaneous_regret(inst, actions, actions[k])
            assert got == pytest.approx(expected, abs=1e-12)


class TestMinGap:
    def test_single_action_undefined(self):
        inst = BanditInstance(theta_star=np.array([1.0]),
                              provider=FixedSetProvider(np.array([[1.0]])))
        assert min_gap(inst) is None

    def test_arithmetic(self):
        inst = BanditInstance(
            theta_star=np.array([1.0, 0.0]),
            provider=FixedSetProvider(
                np.array([[0.9, 0.0], [0.4, 0.0], [0.1, 0.0]])),
            noise="none")
        assert min_gap(inst) == pytest.approx(0.5)

    def test_tie_for_optimal_undefined(self):
        inst = BanditInstance(
            theta_star=np.array([1.0, 0.0]),
            provider=FixedSetProvider(np.array([[0.5, 0.1], [0.5, -0.1]])),
            noise="none")
        assert min_gap(inst) is None

    def test_matches_exhaustive(self):
        rng = np.random.default_rng(33)
        inst = generate_fixed_sphere_instance(6, 10, 4, rng)
        values = np.sort(inst.provider.next_set([]) @ inst.theta_star)[::-1]
        assert min_gap(inst) == pytest.approx(float(values[0] - values[1]))


def test_adaptive_provider_contract():
    # A provider replaying the learner's history still satisfies norm bounds
    class EchoProvider(FixedSetProvider):
        def next_set(self, history):
            if history:
                last = history[-1]
                assert isinstance(last, RoundRecord)
                # adversarially re-emit the learner's last choice first
                chosen = self.actions[last.chosen_index]
                return np.vstack([chosen, self.actions])
            return self.actions

    rng = np.random.default_rng(2)
    base = generate_fixed_sphere_instance(3, 4, 2, rng)
    provider = EchoProvider(base.provider.next_set([]))
    history = []
    for t in range(10):
        actions = provider.next_set(history)
        norms = np.linalg.norm(actions, axis=1)
        assert np.all(norms <= 1.0 + 1e-12)
        history.append(RoundRecord(actions, 0, 0.0))
