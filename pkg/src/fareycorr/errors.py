"""Exception types raised across the package."""


class FareyCorrError(Exception):
    """Base class for package errors."""


class CapacityError(FareyCorrError, MemoryError):
    """A request would exceed the configured memory budget."""


class OutOfRangeError(FareyCorrError, ValueError):
    """An argument lies outside the range covered by precomputed tables."""


class PreconditionError(FareyCorrError, ValueError):
    """An operation was called with inputs violating its preconditions."""


class ConfigurationError(FareyCorrError, ValueError):
    """A required configuration value is missing or inconsistent."""
