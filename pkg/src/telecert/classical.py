"""Classical three-property transition model and its process matrices.

A classical mimicry of teleportation treats the system as an object with
three two-valued properties.  There are 2^3 = 8 definite states, ordered

    xi = 1: (+,+,+)   xi = 2: (+,+,-)   xi = 3: (+,-,+)   xi = 4: (+,-,-)
    xi = 5: (-,+,+)   xi = 6: (-,+,-)   xi = 7: (-,-,+)   xi = 8: (-,-,-)

and the evolution is a stochastic transition between input and output
states.  The canonical parameterisation is the joint matrix omega with
omega[xi, mu] = 2 P(xi) Omega_{xi mu}: nonnegative, total mass 2, and (by
default) uniform input marginals, i.e. for every property and sign the
mass of the four matching rows is 1.

Feeding the induced conditional probabilities through the tomography
pipeline yields the model's process matrix; that map is affine-linear in
omega, which the mimicry optimiser exploits.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .tomography import (
    ConditionalProbTable,
    ObservableTriple,
    process_matrix_from_table,
)

# Sign assignments per state, shape (8, 3): SIGNS[xi, k] is the value
# (+-1) of property k+1 in state xi+1.  Bit 0 of (xi) is property 3.
SIGNS = np.array(
    [
        [+1, +1, +1],
        [+1, +1, -1],
        [+1, -1, +1],
        [+1, -1, -1],
        [-1, +1, +1],
        [-1, +1, -1],
        [-1, -1, +1],
        [-1, -1, -1],
    ],
    dtype=float,
)

# PROPERTY_MASK[k, t] selects the four states with property k+1 equal to
# +1 (t = 0) or -1 (t = 1).
PROPERTY_MASK = np.stack(
    [np.stack([SIGNS[:, k] > 0, SIGNS[:, k] < 0]) for k in range(3)]
)

TOTAL_MASS = 2.0


def validate_transition_matrix(
    omega: np.ndarray,
    uniform_marginals: bool = True,
    tol: float = 1e-9,
) -> np.ndarray:
    """Check the joint-transition-matrix invariants.

    Nonnegative 8x8 with total mass 2; with ``uniform_marginals`` (the
    default) additionally each input property/sign row group must carry
    mass 1, which encodes equally likely +-1 inputs.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (8, 8):
        raise ValidationError(f"transition matrix must be 8x8, got {omega.shape}")
    if np.min(omega) < -tol:
        raise ValidationError(
            f"transition matrix has negative entry {np.min(omega):.3e}"
        )
    total = float(omega.sum())
    if abs(total - TOTAL_MASS) > tol:
        raise ValidationError(
            f"transition matrix total mass is {total:.12f}, expected 2"
        )
    if uniform_marginals:
        row_mass = omega.sum(axis=1)
        for k in range(3):
            for t, label in enumerate("+-"):
                group = float(row_mass[PROPERTY_MASK[k, t]].sum())
                if abs(group - 1.0) > tol:
                    raise ValidationError(
                        f"input marginal for property {k + 1}, sign {label} "
                        f"is {group:.12f}, expected 1 (uniform-marginal mode)"
                    )
    return omega


def optimal_transition_matrix() -> np.ndarray:
    """Joint transition matrix of the best classical mimicry at the default setting.

    Mass 1/8 sits on sixteen entries: each input state may keep or flip one
    designated property while the others are preserved, which realises the
    phase-damping-like optimum.
    """
    omega = np.zeros((8, 8))
    pairs = [
        (1, 1), (1, 3),
        (2, 2), (2, 4),
        (3, 3), (3, 7),
        (4, 4), (4, 8),
        (5, 1), (5, 5),
        (6, 2), (6, 6),
        (7, 5), (7, 7),
        (8, 6), (8, 8),
    ]
    for xi, mu in pairs:
        omega[xi - 1, mu - 1] = 0.125
    return omega


def uniform_transition_matrix() -> np.ndarray:
    """Fully mixing model: every joint entry 2/64."""
    return np.full((8, 8), TOTAL_MASS / 64.0)


def identity_transition_matrix() -> np.ndarray:
    """Deterministic identity map on classical states, mass 1/4 per state."""
    return np.eye(8) * 0.25


def marginal_distribution(omega: np.ndarray) -> np.ndarray:
    """Input-state distribution P(xi) = row mass / 2; sums to 1."""
    omega = validate_transition_matrix(omega, uniform_marginals=False)
    return omega.sum(axis=1) / TOTAL_MASS


def classical_conditional_probs(
    omega: np.ndarray,
    uniform_marginals: bool = True,
) -> ConditionalProbTable:
    """Conditional probabilities induced by the transition model.

    P(v_j = t | v_i = s) sums omega over rows with property i equal to s
    and columns with property j equal to t.  With ``uniform_marginals`` the
    row groups carry mass 1 each so the sums are already normalised;
    without it each (i, s) slice is renormalised by its group mass.
    """
    omega = validate_transition_matrix(omega, uniform_marginals=uniform_marginals)
    probs = np.empty((3, 2, 3, 2))
    for i in range(3):
        for s in range(2):
            rows = omega[PROPERTY_MASK[i, s]]
            norm = 1.0
            if not uniform_marginals:
                mass = float(rows.sum())
                if mass <= 0.0:
                    raise ValidationError(
                        f"input group (property {i + 1}, sign {'+-'[s]}) has zero mass; "
                        "cannot renormalise"
                    )
                norm = mass
            for j in range(3):
                for t in range(2):
                    probs[i, s, j, t] = rows[:, PROPERTY_MASK[j, t]].sum() / norm
    table = ConditionalProbTable(probs=probs)
    table.validate()
    return table


def lhv_equivalent_probs(omega: np.ndarray) -> ConditionalProbTable:
    """The same table via the local-hidden-variable reading.

    Each joint outcome pair lambda = (xi, mu) is a hidden variable with
    weight P(lambda) = omega[xi, mu] / 2, and

        P(v_j = t | v_i = s) = 2 sum_lambda P(v_i = s | lambda) P(lambda)
                                            P(v_j = t | lambda)

    with deterministic response functions.  Algebraically identical to
    :func:`classical_conditional_probs`; kept as an independent route for
    the equivalence property test.
    """
    omega = validate_transition_matrix(omega, uniform_marginals=True)
    probs = np.zeros((3, 2, 3, 2))
    for i in range(3):
        for s, s_val in enumerate((1.0, -1.0)):
            for j in range(3):
                for t, t_val in enumerate((1.0, -1.0)):
                    acc = 0.0
                    for xi in range(8):
                        for mu in range(8):
                            p_in = 1.0 if SIGNS[xi, i] == s_val else 0.0
                            p_out = 1.0 if SIGNS[mu, j] == t_val else 0.0
                            acc += 2.0 * p_in * (omega[xi, mu] / 2.0) * p_out
                    probs[i, s, j, t] = acc
    return ConditionalProbTable(probs=probs)


def classical_process_matrix(
    omega: np.ndarray,
    obs: ObservableTriple,
    uniform_marginals: bool = True,
) -> np.ndarray:
    """Process matrix of the classical model: omega -> table -> chi."""
    table = classical_conditional_probs(omega, uniform_marginals=uniform_marginals)
    return process_matrix_from_table(table, obs)


def _valid_row_masses() -> np.ndarray:
    """Spanning set of row-mass vectors compatible with uniform marginals.

    Uniform rows always work; so does mass 1/2 concentrated on the four
    states sharing any fixed two- or three-property parity, since each
    property/sign group contains exactly two of them.
    """
    patterns = [np.full(8, 0.25)]
    parities = [
        SIGNS[:, 0] * SIGNS[:, 1],
        SIGNS[:, 0] * SIGNS[:, 2],
        SIGNS[:, 1] * SIGNS[:, 2],
        SIGNS[:, 0] * SIGNS[:, 1] * SIGNS[:, 2],
    ]
    for par in parities:
        patterns.append(np.where(par > 0, 0.5, 0.0))
        patterns.append(np.where(par < 0, 0.5, 0.0))
    return np.array(patterns)


_ROW_MASS_PATTERNS = _valid_row_masses()


def random_transition_matrix(rng: np.random.Generator, components: int = 6) -> np.ndarray:
    """Random valid joint transition matrix with uniform input marginals.

    Convex mixture of deterministic maps, each carrying a random convex
    combination of the marginal-compatible row-mass patterns; mixtures of
    valid matrices stay valid.
    """
    omega = np.zeros((8, 8))
    weights = rng.random(components)
    weights /= weights.sum()
    for w in weights:
        targets = rng.integers(0, 8, size=8)
        mass_mix = rng.random(len(_ROW_MASS_PATTERNS))
        mass_mix /= mass_mix.sum()
        row_mass = mass_mix @ _ROW_MASS_PATTERNS
        for xi in range(8):
            omega[xi, targets[xi]] += w * row_mass[xi]
    return omega


def lhs_model_process_matrix() -> np.ndarray:
    """Best mimicry of teleportation by the weaker local-hidden-state model.

    In that model the outputs are quantum states prepared from a hidden
    variable; its optimal process matrix is a published constant, stored at
    4-decimal precision (comparisons against it use tolerance 5e-4).
    """
    return 0.5 * np.array(
        [
            [0.7887, 0, 0, 0.5774],
            [0, 0.2113, 0, 0],
            [0, 0, 0.2113, 0],
            [0.5774, 0, 0, 0.7887],
        ],
        dtype=complex,
    )
