"""Exception types shared across the package."""


class SpecGapError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(SpecGapError):
    """Invalid argument or malformed input value."""


class NonConvergenceError(SpecGapError):
    """Iterative eigensolver did not converge within the iteration budget.

    Carries the number of converged eigenvalues and the best achieved
    residual so callers can report diagnostics.
    """

    def __init__(self, message, converged=0, residual=None):
        super().__init__(message)
        self.converged = converged
        self.residual = residual


class UnsupportedGroupError(SpecGapError):
    """Irreducible representations are not available for this group."""


class ParseError(SpecGapError):
    """A description file could not be parsed or has an unknown schema."""
