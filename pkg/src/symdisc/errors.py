"""Exception hierarchy shared across the package."""


class SymdiscError(Exception):
    """Base class for all library errors."""


class NotPSD(SymdiscError, ValueError):
    pass


class SingularMatrix(SymdiscError, ValueError):
    pass


class ConvergenceError(SymdiscError, RuntimeError):
    pass


class LinearDependence(SymdiscError, ValueError):
    """Codewords are (numerically) linearly dependent; the weighted Gram is singular."""


class FormulaDomain(SymdiscError, ValueError):
    """A closed form was evaluated outside the region where its radicands are non-negative."""


class BudgetExceeded(SymdiscError, RuntimeError):
    pass


class UnsupportedRepresentation(SymdiscError, ValueError):
    pass


class NonInvariantGroup(SymdiscError, ValueError):
    pass


class SolveFailed(SymdiscError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoValidBranch(SolveFailed):
    pass


class PatternTooCoarse(SolveFailed):
    """No solution constant on the pattern classes satisfies the optimality conditions."""
