"""Exception hierarchy shared by every kendep module."""


class KendepError(Exception):
    """Base class for all errors raised by kendep."""


class DomainError(KendepError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(KendepError, ValueError):
    """A request cannot be served with the current configuration."""


class ShapeError(KendepError, ValueError):
    """Input data has an unusable number of rows or columns."""


class ParseError(KendepError, ValueError):
    """A data file could not be parsed.

    Attributes
    ----------
    row, column : int or None
        One-based location of the offending cell when known.
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class FitError(KendepError, RuntimeError):
    """A constrained fit failed or the data were degenerate."""


class UndefinedStatisticError(KendepError, ValueError):
    """A statistic is undefined for the supplied data (e.g. a constant column)."""


class NumericalError(KendepError, RuntimeError):
    """A numerical routine failed to reach the requested accuracy."""
