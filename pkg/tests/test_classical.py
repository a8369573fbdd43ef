import numpy as np
import pytest

import telecert as tc
from telecert.classical import SIGNS
from telecert.errors import ValidationError
from telecert.optimizer import fit_transition_matrix

from conftest import canonical_mimicry_chi, mimicry_reference_table


class TestClassicalStates:
    def test_ordering(self):
        assert SIGNS[0].tolist() == [1, 1, 1]
        assert SIGNS[1].tolist() == [1, 1, -1]
        assert SIGNS[2].tolist() == [1, -1, 1]
        assert SIGNS[7].tolist() == [-1, -1, -1]

    def test_all_assignments_present(self):
        assert len({tuple(row) for row in SIGNS.tolist()}) == 8


class TestValidation:
    def test_optimal_matrix_is_valid(self):
        tc.validate_transition_matrix(tc.optimal_transition_matrix())

    def test_negative_entry_rejected(self):
        omega = tc.uniform_transition_matrix()
        omega[0, 0] = -0.01
        with pytest.raises(ValidationError, match="negative"):
            tc.validate_transition_matrix(omega, uniform_marginals=False)

    def test_wrong_total_rejected(self):
        with pytest.raises(ValidationError, match="total mass"):
            tc.validate_transition_matrix(np.full((8, 8), 0.05))

    def test_marginal_violation_rejected(self):
        omega = np.zeros((8, 8))
        omega[0, 0] = 2.0  # all mass on one input state
        with pytest.raises(ValidationError, match="marginal"):
            tc.validate_transition_matrix(omega)
        tc.validate_transition_matrix(omega, uniform_marginals=False)

    def test_random_generator_produces_valid(self, rng):
        for _ in range(50):
            tc.validate_transition_matrix(tc.random_transition_matrix(rng))


class TestConditionalProbs:
    def test_reference_table_reproduced_exactly(self):
        table = tc.classical_conditional_probs(tc.optimal_transition_matrix())
        assert np.max(np.abs(table.probs - mimicry_reference_table())) == 0.0

    def test_uniform_model_is_flat(self):
        table = tc.classical_conditional_probs(tc.uniform_transition_matrix())
        assert np.allclose(table.probs, 0.5, atol=1e-14)

    def test_non_uniform_marginals_renormalised(self):
        omega = np.zeros((8, 8))
        # all rows map to themselves but input mass is skewed
        for xi in range(8):
            omega[xi, xi] = 0.4 if xi < 4 else 0.1
        with pytest.raises(ValidationError):
            tc.classical_conditional_probs(omega)
        table = tc.classical_conditional_probs(omega, uniform_marginals=False)
        table.validate()


class TestMarginals:
    def test_optimal_is_uniform_eighths(self):
        p = tc.marginal_distribution(tc.optimal_transition_matrix())
        assert np.array_equal(p, np.full(8, 0.125))

    def test_single_row_mass(self):
        omega = np.zeros((8, 8))
        omega[0, 3] = 2.0
        p = tc.marginal_distribution(omega)
        assert p.tolist() == [1.0, 0, 0, 0, 0, 0, 0, 0]

    def test_uniform(self):
        p = tc.marginal_distribution(tc.uniform_transition_matrix())
        assert np.allclose(p, 0.125, atol=1e-15)


class TestLhvEquivalence:
    def test_optimal_matrix_exact(self):
        direct = tc.classical_conditional_probs(tc.optimal_transition_matrix())
        lhv = tc.lhv_equivalent_probs(tc.optimal_transition_matrix())
        assert np.max(np.abs(direct.probs - lhv.probs)) == 0.0

    def test_uniform(self):
        lhv = tc.lhv_equivalent_probs(tc.uniform_transition_matrix())
        assert np.allclose(lhv.probs, 0.5, atol=1e-14)

    def test_random_matrices(self, rng):
        for _ in range(100):
            omega = tc.random_transition_matrix(rng)
            direct = tc.classical_conditional_probs(omega)
            lhv = tc.lhv_equivalent_probs(omega)
            assert np.max(np.abs(direct.probs - lhv.probs)) <= 1e-12


class TestPipeline:
    def test_optimal_gives_phase_damping_matrix(self, default_obs):
        chi = tc.classical_process_matrix(tc.optimal_transition_matrix(), default_obs)
        assert np.max(np.abs(chi - canonical_mimicry_chi())) < 1e-9

    def test_uniform_gives_maximally_mixing(self, default_obs):
        chi = tc.classical_process_matrix(tc.uniform_transition_matrix(), default_obs)
        assert np.max(np.abs(chi - np.eye(4) / 4)) < 1e-14

    def test_identity_map_reproduces_ideal_at_unrotated_obs(self, chi_ideal):
        obs = tc.rotated_observables(0.0, 0.0)
        chi = tc.classical_process_matrix(tc.identity_transition_matrix(), obs)
        assert np.max(np.abs(chi - chi_ideal)) < 1e-12

    def test_affine_linearity(self, rng, default_obs):
        for _ in range(20):
            a = tc.random_transition_matrix(rng)
            b = tc.random_transition_matrix(rng)
            t = rng.random()
            mixed = tc.classical_process_matrix(t * a + (1 - t) * b, default_obs)
            combo = t * tc.classical_process_matrix(a, default_obs) + (
                1 - t
            ) * tc.classical_process_matrix(b, default_obs)
            assert np.max(np.abs(mixed - combo)) <= 1e-12

    def test_trace_and_hermiticity(self, rng, default_obs):
        for _ in range(30):
            chi = tc.classical_process_matrix(tc.random_transition_matrix(rng), default_obs)
            assert abs(np.trace(chi) - 1.0) <= 1e-12
            assert np.max(np.abs(chi - chi.conj().T)) <= 1e-12

    def test_input_property_independence_of_identity_block(self, rng, default_obs):
        # the sum of the two outputs per input property equals the channel
        # acting on I, so it cannot depend on which property was used
        for _ in range(20):
            omega = tc.random_transition_matrix(rng)
            table = tc.classical_conditional_probs(omega)
            sums = []
            for i in range(3):
                pair = sum(
                    tc.reconstruct_output_state(table.probs[i, s], default_obs)
                    for s in range(2)
                )
                sums.append(pair)
            assert np.max(np.abs(sums[0] - sums[2])) <= 1e-9
            assert np.max(np.abs(sums[1] - sums[2])) <= 1e-9


class TestHiddenStateConstant:
    def test_fidelity_against_ideal(self, chi_ideal):
        f = tc.process_fidelity(tc.lhs_model_process_matrix(), chi_ideal)
        assert f == pytest.approx(0.6830, abs=5e-4)

    def test_trace(self):
        tr = np.trace(tc.lhs_model_process_matrix()).real
        assert tr == pytest.approx(1.0, abs=1e-4)

    def test_psd_at_published_precision(self):
        assert tc.is_psd(tc.lhs_model_process_matrix(), 1e-4)

    def test_reachable_by_transition_model(self, default_obs):
        # the weaker hidden-state model's optimum lies inside the
        # transition-model family
        _, residual = fit_transition_matrix(
            tc.lhs_model_process_matrix(), default_obs
        )
        assert residual <= 2e-4
