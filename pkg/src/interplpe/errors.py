"""Exception types raised across the package."""


class LpeError(Exception):
    """Base class for all package errors."""


class InvalidParameter(LpeError, ValueError):
    pass


class InvalidMatrix(LpeError, ValueError):
    pass


class QuadratureDiverged(LpeError, ArithmeticError):
    """Adaptive quadrature ran out of budget; the integrand is likely not integrable."""


class IncompleteDerivatives(LpeError, KeyError):
    pass


class InvalidExponent(InvalidParameter):
    pass


class NoLowerBound(LpeError, ValueError):
    """The kernel is not bounded below by a positive constant near the origin."""


class DataPointCoincidence(LpeError, ValueError):
    """A singular kernel was evaluated exactly at a design point."""


class DuplicateDesignPoints(LpeError, ValueError):
    pass


class InvalidData(LpeError, ValueError):
    pass


class SampleTooSmall(InvalidParameter):
    pass
