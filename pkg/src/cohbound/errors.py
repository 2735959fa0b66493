"""Exception types raised across the package."""


class CoherenceError(Exception):
    """Base class for all package errors."""


class NotHermitian(CoherenceError, ValueError):
    pass


class NotPSD(CoherenceError, ValueError):
    pass


class NoConvergence(CoherenceError, RuntimeError):
    pass


class DimensionMismatch(CoherenceError, ValueError):
    pass


class OutOfRange(CoherenceError, ValueError):
    pass


class BadRank(CoherenceError, ValueError):
    pass


class InvalidState(CoherenceError, ValueError):
    pass


class InvalidDistribution(CoherenceError, ValueError):
    pass


class DimTooLarge(CoherenceError, ValueError):
    pass


class UnsupportedQuantifier(CoherenceError, ValueError):
    pass


class GridTooCoarse(CoherenceError, RuntimeError):
    """Quadrature refinement moved the result by more than the allowed delta."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParseError(CoherenceError, ValueError):
    pass
