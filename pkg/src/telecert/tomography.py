"""Single-qubit process tomography in the matrix-unit basis.

The process matrix chi is a 4x4 Hermitian, trace-1 matrix expressed in the
matrix-unit basis E1=|0><0|, E2=|0><1|, E3=|1><0|, E4=|1><1|.  It is
assembled from the six output states obtained for the eigenstate inputs of
X, Y, Z:

    chi = 1/4 [[ I_hat + V3_hat,  V1_hat + i V2_hat ],
               [ V1_hat - i V2_hat,  I_hat - V3_hat ]]

with I_hat the sum and Vk_hat the difference of the two output states for
input property k (I_hat is computed from property 3; it is input-property
independent whenever the data came from an actual linear channel).

Output-side observables are a complementary triple obtained by conjugating
X, Y, Z with the rotation U(theta, phi); the input side always uses the
bare Pauli triple.  The default output setting is (theta=0, phi=pi/4),
which maximises the gap to classical mimicry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import require_hermitian

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

DEFAULT_THETA = 0.0
DEFAULT_PHI = np.pi / 4

# Eigenstate inputs for the tomography schedule, indexed [property][sign]:
# property 0 -> X eigenstates |+>, |->; 1 -> Y eigenstates |R>, |L>;
# 2 -> Z eigenstates |0>, |1>.  Sign index 0 means outcome +1.
_KETS = {
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2.0),
    "-": np.array([1, -1], dtype=complex) / np.sqrt(2.0),
    "R": np.array([1, 1j], dtype=complex) / np.sqrt(2.0),
    "L": np.array([1, -1j], dtype=complex) / np.sqrt(2.0),
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
}


def _dm(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, ket.conj())


INPUT_EIGENSTATES = np.array(
    [
        [_dm(_KETS["+"]), _dm(_KETS["-"])],
        [_dm(_KETS["R"]), _dm(_KETS["L"])],
        [_dm(_KETS["0"]), _dm(_KETS["1"])],
    ]
)


@dataclass(frozen=True)
class ObservableTriple:
    """Three mutually complementary +-1 observables for the output side.

    Each observable is U(theta, phi) P U(theta, phi)^dagger with P one of
    X, Y, Z, hence traceless and involutory, and the three pairwise
    anticommute.
    """

    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    theta: float
    phi: float

    def as_list(self) -> list[np.ndarray]:
        return [self.v1, self.v2, self.v3]


def rotation_unitary(theta: float, phi: float) -> np.ndarray:
    """The 2x2 rotation that tilts the measurement triple."""
    ct = np.cos(theta / 2.0)
    st = np.sin(theta / 2.0)
    em = np.exp(-1j * phi / 2.0)
    ep = np.exp(1j * phi / 2.0)
    return np.array([[em * ct, em * st], [-ep * st, ep * ct]], dtype=complex)


def rotated_observables(theta: float = DEFAULT_THETA, phi: float = DEFAULT_PHI) -> ObservableTriple:
    """Complementary observable triple U P_k U^dagger for P = X, Y, Z."""
    u = rotation_unitary(theta, phi)
    ud = u.conj().T
    v1 = u @ PAULI_X @ ud
    v2 = u @ PAULI_Y @ ud
    v3 = u @ PAULI_Z @ ud
    triple = ObservableTriple(v1=v1, v2=v2, v3=v3, theta=float(theta), phi=float(phi))
    _check_triple(triple)
    return triple


def _check_triple(obs: ObservableTriple, tol: float = 1e-10) -> None:
    for k, v in enumerate(obs.as_list(), start=1):
        if abs(np.trace(v)) > tol:
            raise ValidationError(f"observable {k} is not traceless")
        if np.max(np.abs(v @ v - IDENTITY_2)) > tol:
            raise ValidationError(f"observable {k} is not involutory")
    vs = obs.as_list()
    for a in range(3):
        for b in range(a + 1, 3):
            anti = vs[a] @ vs[b] + vs[b] @ vs[a]
            if np.max(np.abs(anti)) > tol:
                raise ValidationError(f"observables {a + 1} and {b + 1} do not anticommute")


@dataclass
class ConditionalProbTable:
    """Conditional outcome probabilities P(v_j^out = t | v_i^in = s).

    ``probs`` has shape (3, 2, 3, 2) indexed [input property i][input sign]
    [output property j][output sign]; sign index 0 encodes +1.  For every
    (i, s, j) the two output signs must sum to 1.  ``stderr`` optionally
    carries binomial standard errors of the same shape.
    """

    probs: np.ndarray
    stderr: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.shape != (3, 2, 3, 2):
            raise ValidationError(
                f"probability table must have shape (3, 2, 3, 2), got {self.probs.shape}"
            )

    def validate(self, tol: float = 1e-9) -> None:
        if np.any(self.probs < -tol) or np.any(self.probs > 1.0 + tol):
            raise ValidationError("probability table has entries outside [0, 1]")
        sums = self.probs.sum(axis=3)
        bad = np.max(np.abs(sums - 1.0))
        if bad > tol:
            idx = np.unravel_index(np.argmax(np.abs(sums - 1.0)), sums.shape)
            raise ValidationError(
                f"probability pair for input v{idx[0] + 1}"
                f"{'+' if idx[1] == 0 else '-'}, output property {idx[2] + 1} "
                f"sums to {sums[idx]:.12f}, not 1 (tolerance {tol:.0e})"
            )

    def row(self, i: int, sign: int) -> np.ndarray:
        """The (3, 2) output-probability slice for input property i, sign +-1."""
        return self.probs[i - 1, 0 if sign > 0 else 1]


def reconstruct_output_state(row: np.ndarray, obs: ObservableTriple) -> np.ndarray:
    """Output density matrix from one conditional-probability row.

    rho = 1/2 (I + sum_j [P(+|..) - P(-|..)] V_j) over the output triple.
    The row must be normalised per output property; the result is Hermitian
    with unit trace but not necessarily PSD for inconsistent data.
    """
    row = np.asarray(row, dtype=float)
    if row.shape != (3, 2):
        raise ValidationError(f"row must have shape (3, 2), got {row.shape}")
    sums = row.sum(axis=1)
    if np.max(np.abs(sums - 1.0)) > 1e-9:
        raise ValidationError(
            f"unnormalised row: output-sign sums are {sums.tolist()}, expected 1"
        )
    rho = IDENTITY_2.copy()
    for j, v in enumerate(obs.as_list()):
        rho = rho + (row[j, 0] - row[j, 1]) * v
    return rho / 2.0


def assemble_process_matrix(states: np.ndarray) -> np.ndarray:
    """Assemble chi from the six output states.

    ``states`` is indexed [property i][sign][2x2 output state]; I_hat uses
    property 3 and Vk_hat the +/- difference for property k.
    """
    states = np.asarray(states, dtype=complex)
    if states.shape != (3, 2, 2, 2):
        raise ValidationError(f"states must have shape (3, 2, 2, 2), got {states.shape}")
    i_hat = states[2, 0] + states[2, 1]
    v_hat = [states[k, 0] - states[k, 1] for k in range(3)]
    chi = np.empty((4, 4), dtype=complex)
    chi[:2, :2] = i_hat + v_hat[2]
    chi[:2, 2:] = v_hat[0] + 1j * v_hat[1]
    chi[2:, :2] = v_hat[0] - 1j * v_hat[1]
    chi[2:, 2:] = i_hat - v_hat[2]
    return chi / 4.0


def process_matrix_from_table(table: ConditionalProbTable, obs: ObservableTriple) -> np.ndarray:
    """Full tomography pipeline: table -> six output states -> chi."""
    table.validate()
    states = np.empty((3, 2, 2, 2), dtype=complex)
    for i in range(3):
        for s in range(2):
            states[i, s] = reconstruct_output_state(table.probs[i, s], obs)
    return assemble_process_matrix(states)


def ideal_process_matrix() -> np.ndarray:
    """Process matrix of the identity (ideal teleportation) process.

    Rank-1 and PSD, with entries 1/2 at the four corners.
    """
    chi = np.zeros((4, 4), dtype=complex)
    chi[0, 0] = chi[0, 3] = chi[3, 0] = chi[3, 3] = 0.5
    return chi


def validate_process_matrix(chi: np.ndarray, trace_tol: float = 1e-9) -> np.ndarray:
    """Check the process-matrix invariants: 4x4, Hermitian, trace 1.

    PSD is deliberately not required; experimental tables may produce
    non-PSD matrices, which are flagged elsewhere instead of rejected.
    """
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (4, 4):
        raise ValidationError(f"process matrix must be 4x4, got {chi.shape}")
    require_hermitian(chi, "process matrix")
    tr = np.trace(chi)
    if abs(tr - 1.0) > trace_tol:
        raise ValidationError(f"process matrix trace is {tr:.12f}, expected 1")
    return chi


def apply_process(chi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Apply the channel described by ``chi`` to a 2x2 state.

    The operator sum is rho' = 2 sum_mn chi_mn E_m^dagger rho E_n, the
    scaling chosen so the ideal process matrix acts as the identity.  With
    this pairing the tomography assembly above is the exact inverse of the
    channel action, for every Hermitian chi.
    """
    chi = np.asarray(chi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if chi.shape != (4, 4) or rho.shape != (2, 2):
        raise ValidationError(
            f"apply_process needs a 4x4 chi and 2x2 rho, got {chi.shape} and {rho.shape}"
        )
    chi4 = chi.reshape(2, 2, 2, 2)
    return 2.0 * np.einsum("iajb,ij->ab", chi4, rho)


def born_probabilities(rho: np.ndarray, obs: ObservableTriple) -> np.ndarray:
    """(3, 2) array of outcome probabilities for measuring the triple on rho."""
    out = np.empty((3, 2))
    for j, v in enumerate(obs.as_list()):
        for t, sign in enumerate((1.0, -1.0)):
            proj = (IDENTITY_2 + sign * v) / 2.0
            out[j, t] = float(np.trace(proj @ rho).real)
    return out


def simulate_table(chi: np.ndarray, obs: ObservableTriple) -> ConditionalProbTable:
    """Measurement statistics the channel of ``chi`` produces on the schedule."""
    probs = np.empty((3, 2, 3, 2))
    for i in range(3):
        for s in range(2):
            out = apply_process(chi, INPUT_EIGENSTATES[i, s])
            probs[i, s] = born_probabilities(out, obs)
    return ConditionalProbTable(probs=probs)


def estimate_conditional_probs(counts: np.ndarray) -> ConditionalProbTable:
    """Relative frequencies from outcome tallies, with binomial errors.

    ``counts`` has the table shape (3, 2, 3, 2) of nonnegative tallies; for
    each (input property, input sign, output property) cell the two outcome
    counts must not both be zero.  Standard errors sqrt(p(1-p)/n) are
    attached as metadata.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (3, 2, 3, 2):
        raise ValidationError(f"counts must have shape (3, 2, 3, 2), got {counts.shape}")
    if np.any(counts < 0):
        raise ValidationError("counts must be nonnegative")
    totals = counts.sum(axis=3)
    if np.any(totals <= 0):
        i, s, j = np.argwhere(totals <= 0)[0]
        raise ValidationError(
            f"empty count cell: input v{i + 1}{'+' if s == 0 else '-'}, "
            f"output property {j + 1} has zero total"
        )
    probs = counts / totals[..., None]
    stderr = np.sqrt(probs * (1.0 - probs) / totals[..., None])
    return ConditionalProbTable(probs=probs, stderr=stderr)
