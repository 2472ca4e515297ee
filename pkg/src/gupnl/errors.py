"""Exception hierarchy shared by all gupnl modules."""


class GupError(Exception):
    """Base class for every error raised by gupnl."""


class DomainError(GupError, ValueError):
    """An input lies outside the domain of an operation."""


class DegenerateInputError(DomainError):
    """Input is structurally degenerate (all-zero coefficients, empty diagonal)."""


class NumericError(GupError, ArithmeticError):
    """A numerical procedure failed to converge."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class RangeError(NumericError, OverflowError):
    """An evaluation would overflow double precision."""


class InvariantViolation(GupError):
    """A structural invariant of a state or record does not hold."""
