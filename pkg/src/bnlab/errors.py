"""Exception taxonomy shared by all bnlab modules."""


class BnlabError(Exception):
    """Base class for all library-raised errors."""


class InputError(BnlabError, ValueError):
    """Malformed or out-of-contract input (shapes, ranges, non-finite entries)."""


class ConvergenceError(BnlabError, ArithmeticError):
    """An iterative kernel failed to converge within its sweep budget."""


class PreconditionError(BnlabError):
    """A certificate or builder was called outside its stated hypotheses."""


class ConstructionError(BnlabError):
    """A constructive builder produced an object violating its own contract."""


class ScopeError(BnlabError):
    """Operation invoked outside its supported scope (e.g. wrong nonlinearity)."""


class ResourceError(BnlabError):
    """Requested computation exceeds a hard size guard."""


class OracleError(BnlabError):
    """Numerical oracle failed to reach its target accuracy.

    Carries a ``diagnostics`` dict so failures are debuggable rather than silent.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DivergenceError(BnlabError):
    """Training diverged (cost became non-finite). Carries the last finite trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
