"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(ArithmeticError):
    """An iterative or adaptive computation did not reach its target.

    ``estimate`` holds the best value obtained before giving up (``None`` if
    nothing useful was computed) and ``diagnostics`` a free-form mapping with
    whatever the failing routine knew at the time.
    """

    def __init__(self, message, estimate=None, diagnostics=None):
        super().__init__(message)
        self.estimate = estimate
        self.diagnostics = dict(diagnostics or {})


class ExperimentDesignError(RuntimeError):
    """A Monte-Carlo experiment was configured so that its output is unusable."""
