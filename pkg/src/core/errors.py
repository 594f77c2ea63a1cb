"""
Error hierarchy shared by the library and the command-line front end.
"""


class BellToolkitError(Exception):
    """Base class for every error raised on purpose by this package."""


class InvalidParameterError(BellToolkitError, ValueError):
    """A parameter is outside its documented domain."""


class DimensionError(InvalidParameterError):
    """Array shapes do not fit the requested operation."""


class NumericalConsistencyError(BellToolkitError, ArithmeticError):
    """Two computations that must agree do not, or a result is not physical."""


class DegenerateFilterError(NumericalConsistencyError):
    """The filtered operator has (numerically) zero trace."""


class EvaluationError(NumericalConsistencyError):
    """A closed-form expression cannot be evaluated at the requested point."""


class MultipleCrossingsError(NumericalConsistencyError):
    """The Bell value crosses the local bound more than once on a q interval."""

    def __init__(self, message: str, scan=None):
        super().__init__(message)
        self.scan = scan or []


class OutputError(BellToolkitError, OSError):
    """A result file could not be written."""
