"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

import telecert as tc

SQRT2 = np.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2.0


def random_psd_trace1(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    k = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = k @ k.conj().T
    return m / np.trace(m).real


def random_density(rng: np.random.Generator) -> np.ndarray:
    return random_psd_trace1(rng, 2)


def chi_from_kraus(kraus: list[np.ndarray]) -> np.ndarray:
    """Process matrix of sum_k K rho K^dag under the toolkit's convention.

    With the operator sum rho' = 2 sum chi_mn E_m^dag rho E_n, a Kraus
    operator K contributes the coefficient vector K^T flattened row-major.
    """
    chi = np.zeros((4, 4), dtype=complex)
    for k in kraus:
        kappa = np.asarray(k, dtype=complex).T.reshape(4)
        chi += np.outer(kappa, kappa.conj()) / 2.0
    return chi


def random_cptp_chi(rng: np.random.Generator, n_kraus: int = 4) -> np.ndarray:
    """Random completely positive trace-preserving channel's process matrix."""
    raw = rng.normal(size=(n_kraus, 2, 2)) + 1j * rng.normal(size=(n_kraus, 2, 2))
    s = sum(k.conj().T @ k for k in raw)
    w, v = np.linalg.eigh(s)
    inv_sqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    return chi_from_kraus([k @ inv_sqrt for k in raw])


def canonical_mimicry_chi() -> np.ndarray:
    """Best-mimicry process matrix: corners 1/2, anti-corners 1/(2 sqrt 2)."""
    chi = np.zeros((4, 4), dtype=complex)
    chi[0, 0] = chi[3, 3] = 0.5
    chi[0, 3] = chi[3, 0] = 0.5 / SQRT2
    return chi


# Measurement table of the ideal process at the default observable setting,
# rows (input property, sign), columns (output property, sign).
def ideal_reference_table() -> np.ndarray:
    hi = (1.0 + 1.0 / SQRT2) / 2.0
    lo = (1.0 - 1.0 / SQRT2) / 2.0
    t = np.empty((3, 2, 3, 2))
    t[0, 0] = [[hi, lo], [lo, hi], [0.5, 0.5]]
    t[0, 1] = [[lo, hi], [hi, lo], [0.5, 0.5]]
    t[1, 0] = [[hi, lo], [hi, lo], [0.5, 0.5]]
    t[1, 1] = [[lo, hi], [lo, hi], [0.5, 0.5]]
    t[2, 0] = [[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]]
    t[2, 1] = [[0.5, 0.5], [0.5, 0.5], [0.0, 1.0]]
    return t


# Conditional probabilities of the optimal classical mimicry at the default
# setting (published at 4 decimals; the values are exact quarters).
def mimicry_reference_table() -> np.ndarray:
    t = np.empty((3, 2, 3, 2))
    t[0, 0] = [[0.75, 0.25], [0.25, 0.75], [0.5, 0.5]]
    t[0, 1] = [[0.25, 0.75], [0.75, 0.25], [0.5, 0.5]]
    t[1, 0] = [[0.75, 0.25], [0.75, 0.25], [0.5, 0.5]]
    t[1, 1] = [[0.25, 0.75], [0.25, 0.75], [0.5, 0.5]]
    t[2, 0] = [[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]]
    t[2, 1] = [[0.5, 0.5], [0.5, 0.5], [0.0, 1.0]]
    return t


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)


@pytest.fixture
def default_obs() -> tc.ObservableTriple:
    return tc.rotated_observables()


@pytest.fixture
def chi_ideal() -> np.ndarray:
    return tc.ideal_process_matrix()
