"""Exception types raised by the package."""


class InvalidArgument(ValueError):
    """An argument is outside the domain of an operation."""


class CirculationError(ValueError):
    """A grid field carries non-negligible l = 0 (mean) content."""


class ConstraintViolation(ValueError):
    """A state does not satisfy the relative enstrophy constraint."""


class PreconditionError(ValueError):
    """A state is not stationary where stationarity is required.

    The offending residual is kept on ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
