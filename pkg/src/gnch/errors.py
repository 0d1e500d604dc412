"""Exception types shared across the package."""


class GnchError(Exception):
    """Base class for all package errors."""


class DomainError(GnchError, ValueError):
    """A quantity left the real domain (negative base to a fractional power, log of a non-positive number)."""


class ParamError(GnchError, ValueError):
    """Parameters are inconsistent with the requested scalar mode or operation."""


class SingularError(GnchError, ZeroDivisionError):
    """A determinant used as a denominator vanished."""


class TurningPointError(GnchError):
    """Integration ran into a turning point (amplitude blow-up)."""

    def __init__(self, message: str, t_singular: float, t_last_valid: float):
        super().__init__(message)
        self.t_singular = t_singular
        self.t_last_valid = t_last_valid


class BranchCrossingError(GnchError):
    """Eigenvalue branches come too close to be matched by sort order."""


class ConvergenceError(GnchError):
    """Root finding did not deliver the expected number of real roots."""
