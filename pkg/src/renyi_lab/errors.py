"""Exception and warning types raised by renyi_lab."""


class RenyiLabError(Exception):
    """Base class for all package errors."""


class InvalidStateError(RenyiLabError, ValueError):
    """A vector or matrix does not describe a valid quantum state."""


class DomainError(RenyiLabError, ValueError):
    """An argument lies outside the domain of a function."""


class BracketError(RenyiLabError, ValueError):
    """A threshold search was started with an invalid bracket."""


class NonMonotoneTransitionError(RenyiLabError, RuntimeError):
    """A verdict flipped more than once inside a bracket."""


class ConjecturalAlphaError(DomainError):
    """Raised in strict mode when alpha lies below the conjecture floor."""


class ConjecturalAlphaWarning(UserWarning):
    """Alpha lies in a range where the closed form is only conjectured."""
