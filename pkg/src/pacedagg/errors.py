"""Exception types raised across the package."""


class AggError(Exception):
    """Base class for all errors raised by pacedagg."""


class ConfigError(AggError, ValueError):
    """Invalid or unsupported configuration."""


class DomainError(AggError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UsageError(AggError, ValueError):
    """Inconsistent call, e.g. mismatched vector dimensions."""


class UnstableError(DomainError):
    """Load factor is at or beyond one, so no stationary solution exists."""


class InfeasibleError(DomainError):
    """A requested target cannot be met by any send rate."""
