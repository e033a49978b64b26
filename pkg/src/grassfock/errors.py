"""Exception types raised by grassfock.

Each class name doubles as the diagnostic tag the CLI prints, so keep them
stable.
"""


__all__ = [
    "GrassfockError",
    "NotInvertible",
    "DimensionTooLarge",
    "BoundDiverges",
    "InvalidOrder",
    "ConvergencePreconditionFailed",
    "CapExceeded",
    "QuadratureUnderResolved",
    "GridExceeded",
    "TruncationOverflow",
    "IntegralDiverges",
    "NonFinite",
]


class GrassfockError(Exception):
    """Base class for every precondition failure raised by the library."""


class NotInvertible(GrassfockError, ArithmeticError):
    """The body of the element is zero (within the configured epsilon)."""


class DimensionTooLarge(GrassfockError, ValueError):
    pass


class BoundDiverges(GrassfockError, ValueError):
    """The weight growth rate is too small for the geometric tail bound."""


class InvalidOrder(GrassfockError, ValueError):
    pass


class ConvergencePreconditionFailed(GrassfockError, ValueError):
    pass


class CapExceeded(GrassfockError, RuntimeError):
    pass


class QuadratureUnderResolved(GrassfockError, RuntimeError):
    pass


class GridExceeded(GrassfockError, ValueError):
    pass


class TruncationOverflow(GrassfockError, ValueError):
    pass


class IntegralDiverges(GrassfockError, ArithmeticError):
    pass


class NonFinite(GrassfockError, ArithmeticError):
    pass
