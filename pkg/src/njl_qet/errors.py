"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands disagree on qubit count or an index is out of range."""


class ResourceError(MemoryError):
    """A dense construction would exceed the configured qubit cap."""


class NonUnitaryError(ValueError):
    """A gate matrix failed the unitarity check."""


class NonHermitianError(ValueError):
    """An observable carries complex coefficients."""


class ZeroProbabilityError(ValueError):
    """A forced measurement outcome has (near-)zero Born probability."""


class ConvergenceError(RuntimeError):
    """An iterative solver ran out of iterations.

    ``residual`` is the last step size; ``history`` holds every residual seen.
    """

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = list(history) if history is not None else []


class ConfigError(ValueError):
    """Invalid or unparsable run configuration."""
