class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature ran out of budget before meeting its tolerance.

    The best available estimate and its error bound are kept on the
    exception so callers can decide whether to accept them.
    """

    def __init__(self, message, estimate=None, abserr=None):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class UnsupportedInputError(ValueError):
    """Input is mathematically valid but has no evaluation plan here."""
