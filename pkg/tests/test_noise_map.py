import math

import numpy as np
import pytest

from pecsim.channels import (
    PauliChannel,
    compose,
    depolarizing_channel,
    identity_channel,
    inverse,
    lindblad_channel,
    random_pauli_lindblad,
)
from pecsim.implementability import p_pauli
from pecsim.noise_map import (
    NoiseMap,
    SingularMapError,
    apply_noise,
    identity_noise_map,
    invert_noise_map,
    invertibility_criterion,
    modified_quasiprobability,
    noise_map_from_gate_noises,
    p_over_noisy_gates,
    simulate_estimation,
    theta_lambda,
)

import oracles


def worked_example_map(lam=0.2, alpha=1.0):
    """Depolarizing gate noise on X, Y, Z; noiseless identity gate."""
    a = (1 + 3 * (1 - lam) ** alpha) / 4
    b = (1 - (1 - lam) ** alpha) / 4
    theta = np.full((4, 4), b)
    np.fill_diagonal(theta, a)
    theta[0] = [1.0, 0.0, 0.0, 0.0]
    return NoiseMap(1, theta)


def random_gate_map(rng, n, rate):
    noises = [lindblad_channel(random_pauli_lindblad(n, rate, rng)) for _ in range(4**n)]
    return noise_map_from_gate_noises(noises)


class TestConstruction:
    def test_identity_map(self):
        m = identity_noise_map(2)
        assert np.array_equal(m.theta, np.eye(16))
        assert m.is_physical()

    def test_row_sums_enforced(self):
        theta = np.eye(4)
        theta[2, 2] = 0.9
        with pytest.raises(ValueError):
            NoiseMap(1, theta)

    def test_from_identity_noises(self):
        m = noise_map_from_gate_noises([identity_channel(1)] * 4)
        assert np.allclose(m.theta, np.eye(4))

    def test_worked_example_values(self):
        dep = depolarizing_channel(0.2)
        m = noise_map_from_gate_noises([identity_channel(1), dep, dep, dep])
        expected = worked_example_map()
        assert np.allclose(m.theta, expected.theta, atol=1e-12)
        assert abs(m.theta[1, 1] - 0.85) < 1e-12
        assert abs(m.theta[1, 2] - 0.05) < 1e-12

    def test_uniform_noise_is_left_composition(self):
        rng = np.random.default_rng(0)
        noise = lindblad_channel(random_pauli_lindblad(2, 0.2, rng))
        m = noise_map_from_gate_noises([noise] * 16)
        for _ in range(5):
            e = PauliChannel(2, oracles.random_hptp_coeffs(rng, 2))
            assert np.allclose(
                apply_noise(m, e).coeffs, compose(noise, e).coeffs, atol=1e-10
            )


class TestApplyNoise:
    def test_identity_map_is_neutral(self):
        rng = np.random.default_rng(1)
        c = PauliChannel(2, oracles.random_hptp_coeffs(rng, 2))
        assert np.allclose(apply_noise(identity_noise_map(2), c).coeffs, c.coeffs)

    def test_noiseless_identity_gate_fixes_identity_channel(self):
        m = worked_example_map()
        out = apply_noise(m, identity_channel(1))
        assert np.allclose(out.coeffs, identity_channel(1).coeffs)

    def test_changes_inverse_when_noisy(self):
        m = worked_example_map()
        inv = inverse(depolarizing_channel(0.2))
        assert not np.allclose(apply_noise(m, inv).coeffs, inv.coeffs)

    def test_preserves_normalization(self):
        rng = np.random.default_rng(2)
        m = random_gate_map(rng, 2, 0.3)
        c = PauliChannel(2, oracles.random_hptp_coeffs(rng, 2))
        assert abs(apply_noise(m, c).coeffs.sum() - 1.0) < 1e-9


class TestInvert:
    def test_identity(self):
        assert np.allclose(invert_noise_map(identity_noise_map(2)), np.eye(16))

    def test_worked_example_product(self):
        m = worked_example_map()
        inv = invert_noise_map(m)
        assert np.linalg.norm(m.theta @ inv - np.eye(4)) < 1e-9

    def test_random_maps_product(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = random_gate_map(rng, 2, 0.4)
            inv = invert_noise_map(m)
            assert np.linalg.norm(m.theta @ inv - np.eye(16)) < 1e-9

    def test_equal_rows_singular(self):
        theta = np.eye(4)
        theta[2] = theta[1]
        m = NoiseMap(1, theta)
        with pytest.raises(SingularMapError) as err:
            invert_noise_map(m)
        assert 0 <= err.value.step < 4


class TestModifiedQuasiprobability:
    def test_identity_map_passthrough(self):
        r = inverse(depolarizing_channel(0.2)).coeffs
        q = modified_quasiprobability(identity_noise_map(1), r)
        assert np.allclose(q, r)

    def test_worked_example_values(self):
        m = worked_example_map()
        r = inverse(depolarizing_channel(0.2)).coeffs
        q = modified_quasiprobability(m, r)
        assert np.allclose(q, [1.1973684, -0.0657895, -0.0657895, -0.0657895], atol=1e-7)
        assert abs(q.sum() - 1.0) < 1e-9

    def test_end_to_end_cancellation(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            m = random_gate_map(rng, 2, 0.3)
            error = lindblad_channel(random_pauli_lindblad(2, 0.3, rng))
            r = inverse(error).coeffs
            q = modified_quasiprobability(m, r)
            realized = apply_noise(m, PauliChannel(2, q))
            assert np.allclose(realized.coeffs, r, atol=1e-10)
            canceled = compose(realized, error)
            assert np.max(np.abs(canceled.coeffs - identity_channel(2).coeffs)) < 1e-10

    def test_unnormalized_input_rejected(self):
        with pytest.raises(ValueError):
            modified_quasiprobability(identity_noise_map(1), np.array([0.5, 0, 0, 0]))

    def test_affine_invariance_of_cost(self):
        # Cost over the noisy set of a pushed-forward channel equals the
        # plain Pauli cost of the original channel.
        rng = np.random.default_rng(5)
        for _ in range(10):
            m = random_gate_map(rng, 1, 0.3)
            c = PauliChannel(1, oracles.random_hptp_coeffs(rng, 1))
            assert abs(p_over_noisy_gates(m, apply_noise(m, c)) - p_pauli(c)) < 1e-9


class TestThetaLambda:
    def test_identity(self):
        assert theta_lambda(identity_noise_map(2)) == 0.0

    def test_worked_example(self):
        assert abs(theta_lambda(worked_example_map()) - 0.15) < 1e-12

    def test_near_identity_bound(self):
        theta = np.eye(4) * 0.99 + 0.01 / 3 * (np.ones((4, 4)) - np.eye(4))
        m = NoiseMap(1, theta)
        assert theta_lambda(m) <= 0.01 + 1e-12


class TestInvertibilityCriterion:
    def test_threshold_value(self):
        m = identity_noise_map(2)
        res = invertibility_criterion(m, 10000, 0.01)
        assert abs(res.threshold - 0.1213938) < 1e-6

    def test_identity_passes(self):
        res = invertibility_criterion(identity_noise_map(2), 10000, 0.01)
        assert res.passes
        assert abs(res.frobenius_norm - 4.0) < 1e-12

    def test_single_shot_fails_for_stochastic_map(self):
        res = invertibility_criterion(identity_noise_map(2), 1, 0.01)
        assert res.threshold > 4.0
        assert not res.passes

    def test_huge_shot_count_always_passes(self):
        res = invertibility_criterion(identity_noise_map(1), 10**12, 0.01)
        assert res.passes and res.threshold < 1e-4

    def test_failure_bound_exposed(self):
        res = invertibility_criterion(identity_noise_map(1), 100, 0.01)
        assert res.failure_bound == pytest.approx(math.exp(-100 / (2 * 4)))

    def test_invalid_inputs(self):
        m = identity_noise_map(1)
        with pytest.raises(ValueError):
            invertibility_criterion(m, 0, 0.01)
        with pytest.raises(ValueError):
            invertibility_criterion(m, 10, 1.5)

    def test_banach_inequality(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            m = random_gate_map(rng, 1, float(rng.uniform(0.05, 0.5)))
            inv = invert_noise_map(m)
            lhs = np.sqrt(np.sum(m.theta**2)) * np.sqrt(np.sum(inv**2))
            assert lhs >= 2.0 - 1e-9  # sqrt(D) with D = 4


class TestSimulateEstimation:
    def test_deterministic_rows_recovered_exactly(self):
        theta = np.zeros((4, 4))
        theta[0, 0] = theta[1, 2] = theta[2, 1] = theta[3, 3] = 1.0
        m = NoiseMap(1, theta)
        est = simulate_estimation(m, 7, 0)
        assert np.array_equal(est.theta, theta)

    def test_same_seed_same_estimate(self):
        rng = np.random.default_rng(7)
        m = random_gate_map(rng, 1, 0.2)
        a = simulate_estimation(m, 1000, 42)
        b = simulate_estimation(m, 1000, 42)
        assert np.array_equal(a.theta, b.theta)

    def test_rows_stay_stochastic(self):
        rng = np.random.default_rng(8)
        m = random_gate_map(rng, 2, 0.3)
        est = simulate_estimation(m, 500, 1)
        assert est.is_physical()
        assert np.allclose(est.theta.sum(axis=1), 1.0)

    def test_converges_to_truth(self):
        rng = np.random.default_rng(9)
        m = random_gate_map(rng, 1, 0.2)
        worst = 0.0
        for seed in range(100):
            est = simulate_estimation(m, 10**6, seed)
            worst = max(worst, float(np.max(np.abs(est.theta - m.theta))))
        assert worst < 5e-3

    def test_quasi_map_rejected(self):
        theta = np.eye(4)
        theta[1, 1] = 1.2
        theta[1, 2] = -0.2
        with pytest.raises(ValueError):
            simulate_estimation(NoiseMap(1, theta), 10, 0)

    def test_entry_variance_bounded_by_multinomial_limit(self):
        # Var of each estimated entry is at most 1/(4 N), with sampling slack.
        rng = np.random.default_rng(10)
        m = random_gate_map(rng, 1, 0.4)
        shots = 100
        estimates = np.array(
            [simulate_estimation(m, shots, seed).theta for seed in range(300)]
        )
        worst = float(np.max(np.var(estimates, axis=0)))
        assert worst <= 1.3 / (4 * shots)
