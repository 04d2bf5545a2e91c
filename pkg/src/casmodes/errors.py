"""Exception hierarchy shared by the solvers."""


class CasmodesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CasmodesError, ValueError):
    """Input outside the domain of the requested function."""


class NoBracketError(CasmodesError):
    """A bracketing interval does not contain a sign change."""


class ConvergenceError(CasmodesError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class AccuracyError(CasmodesError):
    """Quadrature could not reach the requested tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class BranchLostError(CasmodesError):
    """Continuation could not re-bracket the tracked root."""

    def __init__(self, message, last_param=None, last_root=None):
        super().__init__(message)
        self.last_param = last_param
        self.last_root = last_root


class NoModeError(CasmodesError):
    """The requested mode family does not exist (e.g. TE surface modes)."""
