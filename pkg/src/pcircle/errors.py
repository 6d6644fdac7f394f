"""Exception hierarchy shared by all modules."""


class PCircleError(Exception):
    """Base class for every error raised by the package."""


class DomainError(PCircleError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(DomainError):
    """A documented precondition (e.g. x in the torus cell) is violated."""


class DegenerateTermError(DomainError):
    """A lattice point sits on the boundary where (s - |m|_p^p)^beta blows up."""


class NonConvergence(PCircleError, ArithmeticError):
    """A quadrature or series failed to reach the requested tolerance.

    ``partial`` carries the best available result, if any.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ResourceError(PCircleError):
    """An enumeration would exceed the configured point budget."""


class InsufficientData(PCircleError, ValueError):
    """Too few usable samples for a fit."""
