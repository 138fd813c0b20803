"""Exception taxonomy shared across the toolkit.

Two broad families matter to the CLI: configuration problems (bad or
missing config, unreadable paths) and data problems (malformed records,
degenerate inputs). Everything else is treated as an internal error.
"""


class SpamscopeError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(SpamscopeError):
    """Invalid or incomplete configuration; maps to exit code 2."""


class DataError(SpamscopeError):
    """Invalid, malformed or degenerate input data; maps to exit code 3."""


class EmptyInput(DataError):
    """An operation that requires a non-empty input received none."""


class InsufficientData(DataError):
    """An aggregate lacks the observations an operation needs."""
