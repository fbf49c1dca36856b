"""Exception types shared across the toolkit."""


class PcapflowError(Exception):
    """Base class for toolkit errors."""


class ParameterError(PcapflowError, ValueError):
    """A parameter is outside its admissible range (e.g. the exponent p)."""


class DomainError(PcapflowError, ValueError):
    """A point or level value lies outside the computational domain."""


class GeometryError(PcapflowError, RuntimeError):
    """Surface extraction or mesh processing failed."""


class NumericError(PcapflowError, RuntimeError):
    """A numerical evaluation produced non-finite or inconsistent data."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConvergenceError(PcapflowError, RuntimeError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class ConfigError(PcapflowError, ValueError):
    """A run configuration file is malformed or incomplete."""
