"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1, data
problems exit 2, numeric failures during training exit 3, incomplete report
inputs exit 4.
"""


class HiciError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(HiciError):
    """Invalid configuration: bad dimensions, unknown keys, bad flag values."""


class ShapeError(HiciError):
    """Array shape mismatch; nothing is ever silently broadcast."""


class NumericError(HiciError):
    """Non-finite value where finiteness is required."""


class DomainError(HiciError):
    """Input outside an operation's domain (empty subset, K < 2, ...)."""


class DataError(HiciError):
    """Base for problems with stored datasets."""


class ParseError(DataError):
    """Malformed data file; message carries file and line number."""


class ConsistencyError(DataError):
    """Files disagree with each other or with their metadata."""


class SplitInfeasibleError(DataError):
    """No random split covering every treatment was found within the retry budget."""


class ReportInputError(HiciError):
    """A report was requested for runs the ledger does not contain."""
