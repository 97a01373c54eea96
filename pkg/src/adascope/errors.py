"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericError -> 3,
I/O failures -> 4. ContractError signals a violated call contract (a bug in
the caller), InputDataError signals malformed user data.
"""


class AdascopeError(Exception):
    """Base class for all package errors."""


class InputDataError(AdascopeError):
    """Malformed external input (bad edge list, label out of range, ...)."""


class ConfigError(AdascopeError):
    """Invalid or inconsistent configuration."""


class ContractError(AdascopeError):
    """A function was called in a way that violates its contract."""


class NumericError(AdascopeError):
    """Non-finite values or divergence detected during computation."""
