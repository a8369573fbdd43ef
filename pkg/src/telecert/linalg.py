"""Dense complex-matrix kernel for small Hermitian problems.

Everything here targets the 2x2 and 4x4 Hermitian matrices used by process
tomography: a cyclic Jacobi eigensolver, PSD tests and projection, and the
trace inner product used as process fidelity.  All operations are pure and
return fresh arrays; 4x4 is the common case and determinism matters more
than asymptotic speed, hence Jacobi instead of a LAPACK call.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

HERMITICITY_TOL = 1e-9

# Off-diagonal Frobenius mass below which a Jacobi sweep loop stops.
_JACOBI_OFF_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 60


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix.

    eigenvalues are real and ascending; eigenvectors are the matching
    orthonormal columns, so ``vectors @ diag(values) @ vectors.conj().T``
    reconstructs the input.
    """

    values: np.ndarray
    vectors: np.ndarray


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation from M = M^dagger."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def require_hermitian(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Validate a square Hermitian matrix and return it as complex128."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > HERMITICITY_TOL:
        raise ValidationError(
            f"{what} is not Hermitian: max |M - M^dagger| = {defect:.3e} "
            f"(tolerance {HERMITICITY_TOL:.0e})"
        )
    return m


def hermitian_eigen(m: np.ndarray) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps zero out off-diagonal entries pair by pair in a fixed (p, q)
    order until the off-diagonal Frobenius mass drops below 1e-14, so the
    output is deterministic for a fixed input.  Eigenvalues are returned
    ascending; each eigenvector column is phase-normalised so its largest
    component is real and positive.
    """
    m = require_hermitian(m)
    n = m.shape[0]
    a = (m + m.conj().T) / 2.0
    v = np.eye(n, dtype=complex)

    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off < _JACOBI_OFF_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mod = abs(apq)
                if mod < 1e-300:
                    continue
                phase = apq / mod
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mod)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                # A <- R^dagger A R with R = I except
                # R[p,p]=R[q,q]=c, R[p,q]=s*phase, R[q,p]=-s*conj(phase).
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q

                vcol_p = v[:, p].copy()
                vcol_q = v[:, q].copy()
                v[:, p] = c * vcol_p - s * np.conj(phase) * vcol_q
                v[:, q] = s * phase * vcol_p + c * vcol_q

    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = v[:, order]

    # Deterministic phase: rotate each column so its largest entry is
    # real positive (first index wins ties).
    for k in range(n):
        col = vectors[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if abs(pivot) > 0.0:
            vectors[:, k] = col * (np.conj(pivot) / abs(pivot))

    return HermitianSpectrum(values=values, vectors=vectors)


def is_psd(m: np.ndarray, tol: float) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``m`` is >= -tol."""
    spec = hermitian_eigen(m)
    return bool(spec.values[0] >= -tol)


def min_eigenvalue(m: np.ndarray) -> float:
    return float(hermitian_eigen(m).values[0])


def project_psd(m: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm, by clipping negative eigenvalues."""
    spec = hermitian_eigen(m)
    clipped = np.clip(spec.values, 0.0, None)
    out = (spec.vectors * clipped) @ spec.vectors.conj().T
    return (out + out.conj().T) / 2.0


def process_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Process fidelity Re tr(a b) between two 4x4 process matrices.

    The sum is accumulated over symmetric index pairs so that swapping the
    arguments reproduces bit-identical output.  If the imaginary residue of
    tr(a b) exceeds 1e-9 (a sign of inconsistent inputs) a warning is
    emitted; the real part is returned either way.

    Lies in [0, 1] when both arguments are PSD with unit trace.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (4, 4) or b.shape != (4, 4):
        raise ValidationError(
            f"process fidelity needs two 4x4 matrices, got {a.shape} and {b.shape}"
        )
    require_hermitian(a, "first argument")
    require_hermitian(b, "second argument")

    real = 0.0
    imag = 0.0
    for m in range(4):
        t = a[m, m] * b[m, m]
        real += t.real
        imag += t.imag
        for n in range(m + 1, 4):
            t = a[m, n] * b[n, m] + a[n, m] * b[m, n]
            real += t.real
            imag += t.imag
    if abs(imag) > 1e-9:
        warnings.warn(
            f"process fidelity has imaginary residue {imag:.3e}; "
            "inputs are likely inconsistent",
            stacklevel=2,
        )
    return float(real)
