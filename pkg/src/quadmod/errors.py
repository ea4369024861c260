"""Exception hierarchy shared by all solvers."""


class QuadmodError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QuadmodError, ValueError):
    """An argument lies outside the domain of a function."""


class SingularArgumentError(DomainError):
    """A hypergeometric argument sits on a singular hyperplane (z = 1)."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole."""


class GeometryError(DomainError):
    """Invalid polygon: non-convex, degenerate or not closing up."""


class ConvergenceError(QuadmodError, RuntimeError):
    """An iterative method stopped without meeting its tolerance."""


class BracketError(ConvergenceError):
    """The target value is not enclosed by the search bracket."""


class RootSelectionError(QuadmodError, ArithmeticError):
    """No (or more than one) cubic root passes the selection predicate."""
