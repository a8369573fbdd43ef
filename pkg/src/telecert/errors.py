"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: validation failures exit 2, a solver
that cannot certify its result exits 3, and a breached internal invariant
exits 4.
"""


class ValidationError(ValueError):
    """Input data violates a documented precondition or file schema."""


class CertificationError(RuntimeError):
    """A solver result could not be certified within its gap tolerance."""


class InvariantError(RuntimeError):
    """An internal cross-check failed; indicates a bug, not bad input."""
