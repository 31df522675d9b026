"""Exception hierarchy shared by all modules."""


class BgnError(Exception):
    """Base class for library errors."""


class DomainError(BgnError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(BgnError, RuntimeError):
    """An iterative method failed to reach its tolerance."""


class SeriesDivergenceError(ConvergenceError):
    """A series failed its Cauchy check within the allowed number of terms."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature could not reach the requested accuracy."""


class DataError(BgnError, ValueError):
    """Input data could not be parsed or is unusable."""


class ParseError(DataError):
    """Malformed input file; the message carries a line number or byte offset."""


class DimensionError(DataError):
    """Image dimensions or a rectangle do not match the data."""


class EmptyRegionError(DataError):
    """No usable (positive, finite) samples remain."""
