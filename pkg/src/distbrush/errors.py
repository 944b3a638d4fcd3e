"""Exception types shared across the package."""


class DistbrushError(Exception):
    """Base class for all package-specific errors."""


class ParseError(DistbrushError):
    """A file could not be parsed (malformed rows, bad JSON, ...)."""


class ValidationError(DistbrushError):
    """Parsed data violates an invariant (NaN/Inf, too few rows, ...)."""


class DimensionError(DistbrushError):
    """Rows of a matrix input have inconsistent widths."""


class ParameterError(DistbrushError):
    """A parameter is outside its documented range."""


class EmptyCoverError(DistbrushError):
    """The painter covers no points, so no seeds can be selected."""


class EmptyContourError(DistbrushError):
    """No iso-contour exists at the requested level."""


class DegenerateError(DistbrushError):
    """Geometric input is degenerate (too few points, all collinear, ...)."""


class GeometryError(DistbrushError):
    """A geometric construction produced an invalid result."""


class AlignmentError(DistbrushError):
    """Dataset and projection row counts disagree."""


class PhaseError(DistbrushError):
    """An operation was requested in a session phase that forbids it."""


class TrajectoryError(DistbrushError):
    """An event trajectory is malformed or illegal for the replayed session."""


class SizeError(DistbrushError):
    """Input is too large for a brute-force reference implementation."""
