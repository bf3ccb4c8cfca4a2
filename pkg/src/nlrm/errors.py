"""Exception types shared across the package."""


class NlrmError(Exception):
    """Base class for all package errors."""


class ShapeError(NlrmError, ValueError):
    """Operands have incompatible or invalid dimensions."""


class DomainError(NlrmError, ValueError):
    """Input is outside the mathematical domain of an operation."""


class NumericError(NlrmError, ArithmeticError):
    """A numerical routine failed (non-finite data, no convergence)."""


class ParseError(NlrmError, ValueError):
    """A matrix or result file could not be parsed."""


class InsufficientDataError(NlrmError, ValueError):
    """Not enough usable data points for an estimate."""
