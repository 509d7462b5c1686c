"""Exception types shared across the package."""


class ClarityError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ClarityError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class NonConvergence(ClarityError, ArithmeticError):
    """Adaptive quadrature or a root search did not reach its tolerance.

    Attributes
    ----------
    value : float or ndarray
        Best estimate available when the iteration stopped.
    error : float or ndarray
        Error estimate achieved at that point.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class SymmetryError(DomainError):
    """The operation requires a signal distribution symmetric about zero."""


class CompatibilityError(DomainError):
    """The signal distribution is not compatible with the zero density assumption."""


class DegenerateError(DomainError):
    """The requested decomposition collapses (e.g. the pure-noise prior)."""


class NoRoot(DomainError):
    """A bracketed root search has no solution on the admissible branch."""


class UnstableDenominatorWarning(RuntimeWarning):
    """A sinc-kernel density estimate was non-positive at an evaluation point."""
