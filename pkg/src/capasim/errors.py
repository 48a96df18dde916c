"""Exception types raised across the package."""


class CapaSimError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(CapaSimError, ValueError):
    pass


class InvalidInputError(CapaSimError, ValueError):
    pass


class InvalidSpecError(CapaSimError, ValueError):
    pass


class InvalidGeometryError(CapaSimError, ValueError):
    pass


class ConfigError(CapaSimError, ValueError):
    """Simulation configuration failed validation."""


class NumericFailureError(CapaSimError, ArithmeticError):
    """A factorization or solve could not be completed."""


class DimensionTooLargeError(CapaSimError, ValueError):
    """Exhaustive search refused because the problem is too large."""
