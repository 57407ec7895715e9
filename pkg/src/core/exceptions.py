class PursuitError(Exception):
    """Base exception for the application."""

    def __init__(self, message: str, original_error: Exception | None = None):
        super().__init__(message)
        self.original_error = original_error


class ZeroSeparation(PursuitError):
    """Raised when the pursuit direction is undefined because the players coincide."""

    pass


class ZeroModulus(PursuitError):
    """Raised when a complex state has modulus zero."""

    pass


class NoEquilibrium(PursuitError):
    """Raised when the circular system has no equilibrium (n > 1)."""

    pass


class InvalidRegime(PursuitError):
    """Raised when a quantity is requested outside the speed-ratio regime where it is defined."""

    pass


class OutOfSpan(PursuitError):
    """Raised when a trajectory is evaluated outside its integrated span."""

    pass


class IntegrationFailed(PursuitError):
    """Raised when the adaptive integrator cannot complete a run."""

    pass


class UnexpectedCapture(PursuitError):
    """Raised when a capture event fires where the regime rules it out."""

    pass


class MaxItersExceeded(PursuitError):
    """Raised when the periodic-orbit iteration does not converge."""

    def __init__(self, message: str, last_residual: float, iterations: int):
        super().__init__(message)
        self.last_residual = last_residual
        self.iterations = iterations


class ScenarioError(PursuitError):
    """Raised when a scenario file cannot be parsed or fails validation."""

    pass


class UnsupportedDirection(PursuitError):
    """Raised when clockwise evader motion is requested."""

    pass
