"""Exception types raised across the package."""


class PerfPlateError(Exception):
    """Base class for all library errors."""


class DomainError(PerfPlateError, ValueError):
    """Argument outside the mathematical domain of a function."""


class GeometryError(PerfPlateError, ValueError):
    """Invalid or singular perforation / lattice geometry."""


class ValidityError(PerfPlateError):
    """Homogenization condition L < lambda/2 violated."""


class ConvergenceError(PerfPlateError, RuntimeError):
    """A series, quadrature or solver failed to reach its tolerance."""


class ConfigError(PerfPlateError, ValueError):
    """Invalid scenario / run configuration.

    ``path`` names the offending field, e.g. ``perforation.b_mm``.
    """

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
