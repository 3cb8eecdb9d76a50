"""Exception types shared across the package."""


class TwinpolError(Exception):
    """Base class for all package errors."""


class ModelError(TwinpolError):
    """Invalid molecular model definition (ordering, symmetry, shapes)."""


class ConvergenceError(TwinpolError):
    """A numerical result did not converge at the requested settings."""


class IntegrationError(TwinpolError):
    """Time propagation violated a conservation tolerance."""


class BasisSizeError(TwinpolError):
    """Requested basis exceeds the supported size."""


class AmbiguousPeaksError(TwinpolError):
    """A peak-pair measurement found a number of peaks other than two."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class ConfigError(TwinpolError):
    """Config file could not be parsed or validated."""
