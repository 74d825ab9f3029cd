"""Exception hierarchy shared by every interplab module."""


class InterpLabError(Exception):
    """Base class for all interplab errors."""


class InputError(InterpLabError, ValueError):
    """An argument violates a documented precondition (shape, range, sign)."""


class CapacityError(InterpLabError):
    """An exhaustive computation was requested beyond its configured cap."""


class PreconditionError(InterpLabError):
    """A numerical precondition failed; ``residual`` carries the offending size."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NumericalInstabilityError(InterpLabError):
    """Two routes that must agree in exact arithmetic drifted too far apart."""

    def __init__(self, message, mismatch=None):
        super().__init__(message)
        self.mismatch = mismatch


class SolverError(InterpLabError):
    """A convex solve failed outright; ``residual`` reports how far off it was."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(InterpLabError):
    """Experiment configuration failed validation; ``keys`` lists the culprits."""

    def __init__(self, message, keys=()):
        super().__init__(message)
        self.keys = list(keys)
