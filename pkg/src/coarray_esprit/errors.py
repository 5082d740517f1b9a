"""Exception types raised across the package."""


class EspritError(Exception):
    """Base class for all package errors."""


class DimensionError(EspritError, ValueError):
    pass


class PreconditionError(EspritError, ValueError):
    pass


class NumericalError(EspritError, ArithmeticError):
    pass


class GeometryError(EspritError, ValueError):
    pass


class CapabilityError(EspritError, ValueError):
    """Requested source count exceeds what the array aperture supports."""


class DegenerateEigenvalueError(NumericalError):
    """An ESPRIT eigenvalue is (numerically) zero, so its phase is undefined."""


class RankError(NumericalError):
    pass


class ConfigError(EspritError, ValueError):
    pass
