"""Exception hierarchy shared by all modules."""


class WulffError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WulffError, ValueError):
    """An argument lies outside the domain of the operation."""


class EvaluationError(WulffError):
    """A norm or surface cannot be evaluated at the requested point."""


class InvalidNormError(WulffError, ValueError):
    """The anisotropy fails positivity or the convexity condition."""


class NumericalError(WulffError, ArithmeticError):
    """An iterative or quadrature routine did not reach its tolerance.

    ``best`` carries the best value found (for the dual norm solver this is a
    lower bound of the supremum).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class GeometryError(WulffError):
    """Degenerate immersion, a point off the expected boundary, etc."""


class TransversalityError(GeometryError):
    """The surface meets the container boundary tangentially."""


class SingularPointError(GeometryError):
    """Query at a point of the singular part of the container boundary."""


class CoverageError(WulffError):
    """Some Gauss-map targets could not be reached."""

    def __init__(self, message, missed=None):
        super().__init__(message)
        self.missed = [] if missed is None else missed


class SchemaError(WulffError, ValueError):
    """Malformed scenario or config file."""
