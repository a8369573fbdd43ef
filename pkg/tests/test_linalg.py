import numpy as np
import pytest

import telecert as tc
from telecert.errors import ValidationError
from telecert.linalg import hermiticity_defect, min_eigenvalue

from conftest import canonical_mimicry_chi, random_hermitian


class TestHermitianEigen:
    def test_identity(self):
        spec = tc.hermitian_eigen(np.eye(2))
        assert np.allclose(spec.values, [1.0, 1.0])

    def test_ideal_process_matrix_is_rank_one(self, chi_ideal):
        spec = tc.hermitian_eigen(chi_ideal)
        assert np.allclose(spec.values, [0.0, 0.0, 0.0, 1.0], atol=1e-12)

    def test_diagonal(self):
        spec = tc.hermitian_eigen(np.diag([-0.5, 1.0]).astype(complex))
        assert np.allclose(spec.values, [-0.5, 1.0])

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError, match="square"):
            tc.hermitian_eigen(np.ones((2, 3)))

    def test_rejects_non_hermitian_with_diagnostic(self):
        m = np.array([[1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(ValidationError, match=r"max \|M - M\^dagger\| = 1\.0"):
            tc.hermitian_eigen(m)

    def test_random_reconstruction(self, rng):
        for _ in range(100):
            m = random_hermitian(rng)
            spec = tc.hermitian_eigen(m)
            rebuilt = (spec.vectors * spec.values) @ spec.vectors.conj().T
            assert np.max(np.abs(rebuilt - m)) <= 1e-10
            gram = spec.vectors.conj().T @ spec.vectors
            assert np.max(np.abs(gram - np.eye(4))) <= 1e-10
            assert np.all(np.diff(spec.values) >= -1e-12)

    def test_deterministic(self, rng):
        m = random_hermitian(rng)
        a = tc.hermitian_eigen(m)
        b = tc.hermitian_eigen(m)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.vectors, b.vectors)


class TestPsd:
    def test_ideal_is_psd(self, chi_ideal):
        assert tc.is_psd(chi_ideal, 1e-9)

    def test_negative_eigenvalue(self):
        assert not tc.is_psd(np.diag([1.0, -0.5]).astype(complex), 1e-9)

    def test_zero_matrix(self):
        assert tc.is_psd(np.zeros((2, 2)), 1e-9)

    def test_projection_clips(self):
        out = tc.project_psd(np.diag([1.0, -0.5]).astype(complex))
        assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-12)

    def test_projection_fixed_point(self, rng):
        for _ in range(20):
            k = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            m = k @ k.conj().T
            assert np.max(np.abs(tc.project_psd(m) - m)) <= 1e-12

    def test_projection_of_negative_identity(self):
        assert np.allclose(tc.project_psd(-np.eye(2)), 0.0, atol=1e-13)

    def test_projection_idempotent(self, rng):
        for _ in range(20):
            m = random_hermitian(rng)
            once = tc.project_psd(m)
            twice = tc.project_psd(once)
            assert np.max(np.abs(twice - once)) <= 1e-12
            assert tc.is_psd(once, 1e-12)

    def test_projection_beats_clipped_competitors(self, rng):
        # any other eigenvalue clipping is farther in Frobenius norm
        for _ in range(10):
            m = random_hermitian(rng)
            best = tc.project_psd(m)
            d_best = np.linalg.norm(best - m)
            spec = tc.hermitian_eigen(m)
            for shift in (0.1, 0.5, 1.0):
                clipped = np.clip(spec.values + shift, 0.0, None)
                comp = (spec.vectors * clipped) @ spec.vectors.conj().T
                assert d_best <= np.linalg.norm(comp - m) + 1e-12


class TestProcessFidelity:
    def test_self_fidelity_of_ideal(self, chi_ideal):
        assert tc.process_fidelity(chi_ideal, chi_ideal) == pytest.approx(1.0, abs=1e-14)

    def test_maximally_mixed_vs_ideal(self, chi_ideal):
        assert tc.process_fidelity(np.eye(4) / 4.0, chi_ideal) == pytest.approx(0.25, abs=1e-14)

    def test_mimicry_value(self, chi_ideal):
        f = tc.process_fidelity(canonical_mimicry_chi(), chi_ideal)
        assert f == pytest.approx(0.853553, abs=1e-6)

    def test_bit_identical_symmetry(self, rng):
        for _ in range(50):
            a = random_hermitian(rng)
            b = random_hermitian(rng)
            assert tc.process_fidelity(a, b) == tc.process_fidelity(b, a)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="4x4"):
            tc.process_fidelity(np.eye(2), np.eye(4) / 4.0)

    def test_non_hermitian_rejected(self):
        bad = np.eye(4, dtype=complex)
        bad[0, 1] = 1.0
        with pytest.raises(ValidationError, match="Hermitian"):
            tc.process_fidelity(bad, np.eye(4) / 4.0)

    def test_range_for_psd_unit_trace(self, rng):
        from conftest import random_psd_trace1

        for _ in range(50):
            a = random_psd_trace1(rng)
            b = random_psd_trace1(rng)
            f = tc.process_fidelity(a, b)
            assert -1e-12 <= f <= 1.0 + 1e-12


def test_hermiticity_defect():
    m = np.array([[1.0, 0.5 + 0.5j], [0.5 - 0.5j, 1.0]])
    assert hermiticity_defect(m) == 0.0
    m[0, 1] = 1.0
    assert hermiticity_defect(m) > 0.0


def test_min_eigenvalue(chi_ideal):
    assert min_eigenvalue(chi_ideal) == pytest.approx(0.0, abs=1e-12)
