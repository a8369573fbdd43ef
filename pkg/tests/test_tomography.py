import numpy as np
import pytest

import telecert as tc
from telecert.errors import ValidationError
from telecert.tomography import (
    INPUT_EIGENSTATES,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    born_probabilities,
)

from conftest import (
    SQRT2,
    canonical_mimicry_chi,
    chi_from_kraus,
    ideal_reference_table,
    random_cptp_chi,
    random_density,
)


class TestRotatedObservables:
    def test_default_first_observable(self):
        obs = tc.rotated_observables(0.0, np.pi / 4)
        expected = np.array([[0, (1 - 1j) / SQRT2], [(1 + 1j) / SQRT2, 0]])
        assert np.max(np.abs(obs.v1 - expected)) < 1e-12

    def test_default_second_and_third(self):
        obs = tc.rotated_observables()
        v2 = np.array([[0, (-1 - 1j) / SQRT2], [(-1 + 1j) / SQRT2, 0]])
        assert np.max(np.abs(obs.v2 - v2)) < 1e-12
        assert np.max(np.abs(obs.v3 - PAULI_Z)) < 1e-12

    def test_identity_rotation_gives_paulis(self):
        obs = tc.rotated_observables(0.0, 0.0)
        assert np.max(np.abs(obs.v1 - PAULI_X)) < 1e-12
        assert np.max(np.abs(obs.v2 - PAULI_Y)) < 1e-12
        assert np.max(np.abs(obs.v3 - PAULI_Z)) < 1e-12

    @pytest.mark.parametrize("theta,phi", [(np.pi, 0.0), (1.3, 2.1), (0.4, -0.7)])
    def test_invariants_at_any_angle(self, theta, phi):
        obs = tc.rotated_observables(theta, phi)
        for v in obs.as_list():
            assert abs(np.trace(v)) < 1e-10
            assert np.max(np.abs(v @ v - np.eye(2))) < 1e-10
        vs = obs.as_list()
        for a in range(3):
            for b in range(a + 1, 3):
                anti = vs[a] @ vs[b] + vs[b] @ vs[a]
                assert np.max(np.abs(anti)) < 1e-10


class TestReconstruction:
    def test_ideal_plus_row(self, default_obs):
        row = ideal_reference_table()[0, 0]
        rho = tc.reconstruct_output_state(row, default_obs)
        plus = np.full((2, 2), 0.5, dtype=complex)
        assert np.max(np.abs(rho - plus)) < 1e-12

    def test_flat_row_gives_maximally_mixed(self, default_obs):
        rho = tc.reconstruct_output_state(np.full((3, 2), 0.5), default_obs)
        assert np.max(np.abs(rho - np.eye(2) / 2)) < 1e-14

    def test_ideal_zero_row(self, default_obs):
        row = ideal_reference_table()[2, 0]
        rho = tc.reconstruct_output_state(row, default_obs)
        assert np.max(np.abs(rho - np.diag([1.0, 0.0]))) < 1e-12

    def test_unnormalised_row_rejected(self, default_obs):
        row = np.full((3, 2), 0.5)
        row[0, 0] = 0.6
        with pytest.raises(ValidationError, match="unnormalised"):
            tc.reconstruct_output_state(row, default_obs)


class TestAssembly:
    def test_ideal_outputs_give_corner_matrix(self, default_obs, chi_ideal):
        table = tc.ConditionalProbTable(probs=ideal_reference_table())
        chi = tc.process_matrix_from_table(table, default_obs)
        assert np.max(np.abs(chi - chi_ideal)) < 1e-12

    def test_fully_mixing_outputs(self):
        states = np.array([[np.eye(2) / 2] * 2] * 3, dtype=complex)
        chi = tc.assemble_process_matrix(states)
        assert np.max(np.abs(chi - np.eye(4) / 4)) < 1e-14

    def test_trace_one_for_any_normalised_table(self, rng, default_obs):
        for _ in range(20):
            probs = rng.random((3, 2, 3, 2))
            probs[..., 1] = 1.0 - probs[..., 0]
            table = tc.ConditionalProbTable(probs=probs)
            chi = tc.process_matrix_from_table(table, default_obs)
            assert abs(np.trace(chi) - 1.0) < 1e-12


class TestIdealProcessMatrix:
    def test_constant(self, chi_ideal):
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[0, 3] = expected[3, 0] = expected[3, 3] = 0.5
        assert np.array_equal(chi_ideal, expected)

    def test_trace_and_psd(self, chi_ideal):
        assert np.trace(chi_ideal).real == pytest.approx(1.0)
        assert tc.is_psd(chi_ideal, 1e-12)


class TestApplyProcess:
    def test_identity_process(self, rng, chi_ideal):
        for _ in range(20):
            rho = random_density(rng)
            assert np.max(np.abs(tc.apply_process(chi_ideal, rho) - rho)) < 1e-12

    def test_mimicry_acts_as_phase_damping(self):
        plus = np.full((2, 2), 0.5, dtype=complex)
        minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
        out = tc.apply_process(canonical_mimicry_chi(), plus)
        expected = 0.8535533905932737 * plus + 0.1464466094067263 * minus
        assert np.max(np.abs(out - expected)) < 1e-12

    def test_fully_mixing(self, rng):
        for _ in range(10):
            rho = random_density(rng)
            out = tc.apply_process(np.eye(4, dtype=complex) / 4.0, rho)
            assert np.max(np.abs(out - np.eye(2) / 2)) < 1e-12

    def test_trace_preserving_channels(self, rng):
        for _ in range(20):
            chi = random_cptp_chi(rng)
            rho = random_density(rng)
            out = tc.apply_process(chi, rho)
            assert abs(np.trace(out) - 1.0) < 1e-9


class TestRoundTrip:
    def test_cptp_channels(self, rng, default_obs):
        for _ in range(30):
            chi = random_cptp_chi(rng)
            table = tc.simulate_table(chi, default_obs)
            rebuilt = tc.process_matrix_from_table(table, default_obs)
            assert np.max(np.abs(rebuilt - chi)) < 1e-9

    def test_trace_preserving_affine_combinations(self, rng, default_obs):
        # mild affine extrapolations of TP channels stay TP but need not be
        # CP; their statistics can still form a valid table, which the
        # tomography must invert exactly
        checked = 0
        for _ in range(40):
            chis = [random_cptp_chi(rng) for _ in range(3)]
            w = rng.dirichlet((1.0, 1.0, 1.0))
            w = 1.3 * w - 0.1  # slightly outside the simplex, still affine
            chi = sum(wk * ck for wk, ck in zip(w, chis))
            table_probs = np.empty((3, 2, 3, 2))
            for i in range(3):
                for s in range(2):
                    out = tc.apply_process(chi, INPUT_EIGENSTATES[i, s])
                    table_probs[i, s] = born_probabilities(out, default_obs)
            assert np.abs(table_probs.sum(axis=3) - 1.0).max() < 1e-9
            table = tc.ConditionalProbTable(probs=table_probs)
            try:
                table.validate()
            except tc.ValidationError:
                continue  # statistics left [0, 1]: not a reconstructible table
            rebuilt = tc.process_matrix_from_table(table, default_obs)
            assert np.max(np.abs(rebuilt - chi)) < 1e-9
            checked += 1
        assert checked >= 20

    def test_other_observable_settings(self, rng):
        obs = tc.rotated_observables(1.1, 0.6)
        for _ in range(10):
            chi = random_cptp_chi(rng)
            rebuilt = tc.process_matrix_from_table(tc.simulate_table(chi, obs), obs)
            assert np.max(np.abs(rebuilt - chi)) < 1e-9


class TestEstimateConditionalProbs:
    def test_even_counts(self):
        counts = np.full((3, 2, 3, 2), 50.0)
        table = tc.estimate_conditional_probs(counts)
        assert np.allclose(table.probs, 0.5)
        assert np.allclose(table.stderr, np.sqrt(0.25 / 100.0))

    def test_skewed_counts(self):
        counts = np.full((3, 2, 3, 2), 25.0)
        counts[..., 0] = 75.0
        table = tc.estimate_conditional_probs(counts)
        assert np.allclose(table.probs[..., 0], 0.75)

    def test_empty_cell_rejected(self):
        counts = np.full((3, 2, 3, 2), 10.0)
        counts[1, 0, 2] = 0.0
        with pytest.raises(ValidationError, match="v2\\+.*property 3"):
            tc.estimate_conditional_probs(counts)


def test_validate_process_matrix_rejects_bad_trace():
    with pytest.raises(ValidationError, match="trace"):
        tc.validate_process_matrix(np.eye(4, dtype=complex))


def test_kraus_helper_builds_unit_trace():
    chi = chi_from_kraus([np.eye(2, dtype=complex)])
    assert np.trace(chi).real == pytest.approx(1.0)
