"""Exception and warning types raised across the package."""


class AnisofemError(Exception):
    """Base class for all package errors."""


class DegenerateElement(AnisofemError):
    """A triangle has (near) zero area."""


class EvaluationAtSingularity(AnisofemError):
    """A singular quantity was requested at the reentrant corner."""


class SolverDivergence(AnisofemError):
    """An iterative solve hit its iteration cap before converging."""


class NonpositiveDiagonal(AnisofemError):
    """Diagonal scaling needs a strictly positive diagonal."""


class FactorizationFailure(AnisofemError):
    """A symmetric factorization broke down (input is not SPD)."""


class UniformField(AnisofemError):
    """All element Hessians vanish, so no regularization parameter exists."""


class MalformedCsv(AnisofemError):
    """A study CSV could not be parsed."""


class ZeroEstimate(UserWarning):
    """The error estimate residual is identically zero."""


class AdaptationStall(UserWarning):
    """A local remeshing pass made no changes before reaching the uniformity target."""
