"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class UnsupportedParameterError(ValueError):
    """An argument is outside the supported parameter range."""


class AccuracyError(RuntimeError):
    """A numerical routine could not reach the requested accuracy.

    Carries the best available estimate and its error estimate so callers
    can decide whether the degraded result is still usable.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class IntegrationFailureError(RuntimeError):
    """The ODE integrator failed (step-size underflow or solver abort)."""


class BracketFailureError(RuntimeError):
    """A sign-change bracket could not be found within the expansion budget."""


class ResolutionFailureError(RuntimeError):
    """The certified tail bound cannot be pushed below the requested
    tolerance within the allowed integration range."""


class NonConvergenceError(RuntimeError):
    """Fixed-point iteration did not converge.  Carries the diagnostics
    accumulated so far."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class FitError(RuntimeError):
    """A least-squares fit was degenerate or ill-conditioned."""
