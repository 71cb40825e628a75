"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes, so new exceptions should subclass
DataError (bad input, exit 2) or BackendError (generation failure, exit 3).
"""


class LoadcastError(Exception):
    """Base class for all errors raised by this package."""


class DataError(LoadcastError):
    """Input data violates a contract (format, range, span, ...)."""


class BackendError(LoadcastError):
    """A sentence-generation backend could not produce an answer."""
