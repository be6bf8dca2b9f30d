"""Exception hierarchy shared by all modules."""


class BispectralError(Exception):
    """Base class for every error raised by this package."""


class InputShapeError(BispectralError, ValueError):
    pass


class InputValueError(BispectralError, ValueError):
    pass


class DomainError(BispectralError, ValueError):
    """Arguments fall outside the domain where an operation is defined."""


class PreconditionError(BispectralError, ValueError):
    pass


class PartitionError(BispectralError, ValueError):
    pass


class DimensionError(BispectralError, ValueError):
    pass


class ScaleError(BispectralError):
    """Exhaustive enumeration requested beyond the desk-scale cap."""


class ConvergenceError(BispectralError, ArithmeticError):
    """Power iteration hit its cap; ``interval`` holds the last bracket on rho."""

    def __init__(self, message: str, interval: tuple[float, float]):
        super().__init__(message)
        self.interval = interval


class CertificateViolation(BispectralError, AssertionError):
    """A scaled row sum exceeded phi^2. Never a valid outcome."""


class TheoremViolation(BispectralError, AssertionError):
    """Tightness and decomposition disagree. Signals an implementation bug."""
