"""Exceptions shared across modules, mapped to CLI exit codes."""


class BudgetExceeded(RuntimeError):
    """An enumeration or histogram product would exceed its cost budget.

    Carries the estimated cost so callers can report it before refusing.
    """

    def __init__(self, message: str, estimate: int | None = None):
        super().__init__(message)
        self.estimate = estimate


class ParseError(ValueError):
    """Malformed polynomial / JSON input."""


class DegenerateError(ValueError):
    """A computation was requested outside its validity range.

    Typical case: the characteristic divides n+1, so the vertex-matrix
    determinants +-(n+1) vanish mod p and the toric reduction behind the
    L-function degree claims breaks down.
    """


class VerificationError(AssertionError):
    """An exact internal cross-check failed (always a bug, never data)."""
