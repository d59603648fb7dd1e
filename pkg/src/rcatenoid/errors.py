"""Exception types raised by the library."""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    ``value`` and ``error_estimate`` hold the best result obtained.
    """

    def __init__(self, message, value=float("nan"), error_estimate=float("inf")):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class IntegrationError(ArithmeticError):
    """The ODE integrator gave up (step underflow or step budget exhausted).

    ``partial`` carries whatever trajectory was accepted before the failure.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class StepSizeUnderflow(IntegrationError):
    """The step size fell below the spacing of doubles at the current time."""
