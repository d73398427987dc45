"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its tolerance.

    The best available estimate is kept on the exception so callers can
    decide whether it is still usable.
    """

    def __init__(self, message, estimate=None, error=None, payload=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.payload = payload


class QuadratureError(ConvergenceError):
    """Adaptive quadrature hit its subdivision cap before meeting rel_tol."""


class GridTooCoarseError(ConvergenceError):
    """A grid-based solver estimates its discretization error above target."""
