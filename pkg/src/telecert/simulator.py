"""Density-matrix simulation of teleportation over noisy entangled links.

Each link teleports the travelling qubit with a resource pair mixed with
white noise, rho_E = (1 - p) |phi+><phi+| + p I/4.  The protocol is the
standard one: project the input qubit and the sender half of the pair onto
the Bell basis, apply the matching Pauli correction on the receiver half,
and average over outcomes.  A Werner resource makes the link a
depolarising channel, so the process fidelity obeys the closed form
1 - 3p/4 (and 1/4 + 3/4 (1-p)^N for an N-link chain); the simulation is
the ground truth and the closed form is kept as a cross-checked fast path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import is_psd, process_fidelity, require_hermitian
from .network import ThresholdSet, classify, compose, compose_n, paper_thresholds
from .tomography import (
    INPUT_EIGENSTATES,
    ObservableTriple,
    PAULI_X,
    PAULI_Z,
    ConditionalProbTable,
    born_probabilities,
    ideal_process_matrix,
    process_matrix_from_table,
)

_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2.0)

# Bell basis (phi+, phi-, psi+, psi-) and the receiver-side corrections
# that recover the input when the resource is phi+.
_BELL_KETS = np.array(
    [
        [1, 0, 0, 1],
        [1, 0, 0, -1],
        [0, 1, 1, 0],
        [0, 1, -1, 0],
    ],
    dtype=complex,
) / np.sqrt(2.0)
_CORRECTIONS = [
    np.eye(2, dtype=complex),
    PAULI_Z,
    PAULI_X,
    PAULI_X @ PAULI_Z,
]


def werner_state(p: float) -> np.ndarray:
    """Entangled pair mixed with white noise of intensity p."""
    if not (0.0 <= p <= 1.0):
        raise ValidationError(f"noise intensity must lie in [0, 1], got {p}")
    pure = np.outer(_PHI_PLUS, _PHI_PLUS.conj())
    return (1.0 - p) * pure + p * np.eye(4, dtype=complex) / 4.0


def depolarizing_fidelity(p: float, n_links: int = 1) -> float:
    """Closed-form chain fidelity for equal-noise Werner links.

    1 - 3p/4 for one link, 1/4 + 3/4 (1-p)^N for N; the simulation must
    agree with this within 1e-9 (enforced by the test suite).
    """
    if n_links == 1:
        return 1.0 - 0.75 * p
    return 0.25 + 0.75 * (1.0 - p) ** n_links


def _validate_resource(resource: np.ndarray) -> np.ndarray:
    resource = np.asarray(resource, dtype=complex)
    if resource.shape != (4, 4):
        raise ValidationError(f"resource state must be 4x4, got {resource.shape}")
    require_hermitian(resource, "resource state")
    if abs(np.trace(resource) - 1.0) > 1e-9:
        raise ValidationError("resource state must have unit trace")
    if not is_psd(resource, 1e-9):
        raise ValidationError("resource state is not positive semidefinite")
    return resource


def bell_measurement_stats(
    resource: np.ndarray, rho_in: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Outcome probabilities and averaged corrected output of one teleport.

    Returns (probabilities over the four Bell outcomes, output 2x2 state).
    The probabilities sum to one for any unit-trace input.
    """
    rho3 = np.kron(rho_in, resource).reshape(2, 2, 2, 2, 2, 2)
    probs = np.empty(4)
    out = np.zeros((2, 2), dtype=complex)
    for k in range(4):
        bell = _BELL_KETS[k].reshape(2, 2)
        m = np.einsum("ab,abcxyz,xy->cz", bell.conj(), rho3, bell)
        probs[k] = float(np.trace(m).real)
        u = _CORRECTIONS[k]
        out += u @ m @ u.conj().T
    return probs, out


def teleport_output(resource: np.ndarray, rho_in: np.ndarray) -> np.ndarray:
    """Output state of one teleportation link (outcome-averaged)."""
    return bell_measurement_stats(resource, rho_in)[1]


def _chain_output(resources: list[np.ndarray], rho_in: np.ndarray) -> np.ndarray:
    rho = rho_in
    for resource in resources:
        rho = teleport_output(resource, rho)
    return rho


def _tomograph_chain(resources: list[np.ndarray], obs: ObservableTriple) -> np.ndarray:
    probs = np.empty((3, 2, 3, 2))
    for i in range(3):
        for s in range(2):
            out = _chain_output(resources, INPUT_EIGENSTATES[i, s])
            probs[i, s] = born_probabilities(out, obs)
    return process_matrix_from_table(ConditionalProbTable(probs=probs), obs)


def teleport_channel(resource: np.ndarray, obs: ObservableTriple) -> np.ndarray:
    """Process matrix of one teleportation link, by full tomography."""
    resource = _validate_resource(resource)
    return _tomograph_chain([resource], obs)


@dataclass
class NetworkReport:
    """Simulated fidelities for a chain of noisy links.

    ``f_1_given_n`` composes the per-link process matrices;
    ``f_end_to_end`` tomographs the whole chain as one channel (the two
    agree for a faithful simulation).  ``f_11n`` chains the first link's
    matrix with every prefix chain, the verifier-side variant.  For two
    links the conventional names f_expt12 / f_expt1given2 / f_expt112 are
    aliased.
    """

    links: list[float]
    chi_links: list[np.ndarray]
    f_1_given_n: float
    f_11n: float
    f_end_to_end: float
    f_expt12: float | None = None
    f_expt1given2: float | None = None
    f_expt112: float | None = None


def network_fidelities(links: list[float], obs: ObservableTriple) -> NetworkReport:
    """Per-link tomography plus the chain fidelities of a noisy network."""
    if len(links) < 1:
        raise ValidationError("a network needs at least one link")
    resources = [werner_state(p) for p in links]
    chi_i = ideal_process_matrix()
    chi_links = [_tomograph_chain([r], obs) for r in resources]

    chain = chi_links[0]
    prefix_chains = [chi_links[0]]
    for chi in chi_links[1:]:
        chain = compose(chain, chi)
        prefix_chains.append(chain)
    f_1_given_n = process_fidelity(chain, chi_i)

    verifier_chain = chi_links[0]
    for k in range(1, len(links)):
        verifier_chain = compose(verifier_chain, prefix_chains[k])
    f_11n = process_fidelity(verifier_chain, chi_i)

    f_end_to_end = process_fidelity(_tomograph_chain(resources, obs), chi_i)

    report = NetworkReport(
        links=[float(p) for p in links],
        chi_links=chi_links,
        f_1_given_n=f_1_given_n,
        f_11n=f_11n,
        f_end_to_end=f_end_to_end,
    )
    if len(links) == 2:
        report.f_expt12 = f_end_to_end
        report.f_expt1given2 = f_1_given_n
        report.f_expt112 = f_11n
    return report


def bisect_noise_crossing(
    fidelity_of_p,
    threshold: float,
    tol: float = 1e-8,
) -> tuple[float, bool]:
    """Smallest p with fidelity_of_p(p) = threshold, assuming decay in p.

    Returns (p_star, saturated).  ``saturated`` is True when no crossing
    exists in [0, 1]: either the curve starts below the threshold or never
    reaches it.  Monotone decay is verified at the bracket endpoints, not
    assumed blindly.
    """
    f0 = fidelity_of_p(0.0)
    f1 = fidelity_of_p(1.0)
    if f0 < f1:
        raise ValidationError(
            "fidelity curve increases with noise; bisection expects decay"
        )
    if f0 <= threshold:
        return 0.0, True
    if f1 > threshold:
        return 1.0, True
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if fidelity_of_p(mid) > threshold:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0, False


@dataclass
class ToleranceRow:
    criterion: str
    n: int
    threshold: float
    p_star: float
    saturated: bool


def noise_tolerance(
    criterion: str,
    n_values: list[int],
    obs: ObservableTriple,
    thresholds: ThresholdSet | None = None,
) -> list[ToleranceRow]:
    """Minimum per-link white noise that defeats an N-link criterion.

    All links carry the same noise p; for each N a bisection solves
    F(p*) = threshold(N) on the simulated fidelity.  ``criterion`` selects
    F_expt1|N ("exptN", the per-link composition) or F_expt11N
    ("expt11N", the verifier-side chain).
    """
    if criterion not in ("exptN", "expt11N"):
        raise ValidationError(f"criterion must be 'exptN' or 'expt11N', got {criterion!r}")
    if not n_values:
        raise ValidationError("n_values must be non-empty")
    ts = thresholds or paper_thresholds()
    rows = []
    for n in n_values:
        if n < 1:
            raise ValidationError(f"link counts must be >= 1, got {n}")
        threshold = ts.f_gc1given_n(n)
        chi_i = ideal_process_matrix()

        def fid(p: float, n: int = n) -> float:
            link = teleport_channel(werner_state(p), obs)
            if criterion == "exptN":
                return process_fidelity(compose_n(link, n), chi_i)
            chain = link
            for k in range(2, n + 1):
                chain = compose(chain, compose_n(link, k))
            return process_fidelity(chain, chi_i)

        p_star, saturated = bisect_noise_crossing(fid, threshold)
        rows.append(
            ToleranceRow(criterion=criterion, n=int(n), threshold=threshold,
                         p_star=p_star, saturated=saturated)
        )
    return rows


@dataclass
class NoiseSweepRow:
    p: float
    f_expt12: float
    f_expt1given2: float
    f_expt112: float
    bell_nonlocal: bool
    nonbilocal: bool
    steering: bool
    nonlocality_steering: bool
    band_expt12: str
    band_expt1given2: str


@dataclass
class NoiseSweepResult:
    rows: list[NoiseSweepRow]
    crossings: dict[str, tuple[float, bool]]


def noise_sweep(
    p_grid: np.ndarray,
    obs: ObservableTriple,
    thresholds: ThresholdSet | None = None,
) -> NoiseSweepResult:
    """Two-link fidelities and hierarchy verdicts along a common-noise grid.

    Also reports the bisected threshold crossings (p*, saturated) of the
    end-to-end fidelity against the Bell and steering bounds, and of the
    composed fidelity against the bilocal and hybrid bounds.
    """
    p_grid = np.atleast_1d(np.asarray(p_grid, dtype=float))
    if np.any(p_grid < 0) or np.any(p_grid > 1):
        raise ValidationError("noise grid must lie in [0, 1]")
    ts = thresholds or paper_thresholds()
    chi_i = ideal_process_matrix()
    rows = []
    for p in p_grid:
        report = network_fidelities([float(p), float(p)], obs)
        verdict = classify(
            f_expt12=min(1.0, report.f_expt12),
            f_expt1given2=min(1.0, report.f_expt1given2),
            f_expt112=None,
            thresholds=ts,
        )
        rows.append(
            NoiseSweepRow(
                p=float(p),
                f_expt12=report.f_expt12,
                f_expt1given2=report.f_expt1given2,
                f_expt112=report.f_expt112,
                bell_nonlocal=verdict.bell_nonlocal,
                nonbilocal=verdict.nonbilocal,
                steering=verdict.steering,
                nonlocality_steering=verdict.nonlocality_steering,
                band_expt12=verdict.band_expt12,
                band_expt1given2=verdict.band_expt1given2,
            )
        )

    def f_two_link(p: float) -> float:
        link = teleport_channel(werner_state(p), obs)
        return process_fidelity(compose(link, link), chi_i)

    crossings = {
        "bell_nonlocal": bisect_noise_crossing(f_two_link, ts.f_gc12),
        "nonbilocal": bisect_noise_crossing(f_two_link, ts.f_gc1given2),
        "steering": bisect_noise_crossing(f_two_link, ts.f_c12),
        "nonlocality_steering": bisect_noise_crossing(f_two_link, ts.f_gc1givenc2),
    }
    return NoiseSweepResult(rows=rows, crossings=crossings)
