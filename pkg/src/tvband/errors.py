"""Exception types shared across the package."""


class TvbandError(Exception):
    """Base class for all package-specific errors."""


class ZeroMassError(TvbandError):
    """Raised when a kernel window contains no observations (zero total weight)."""


class StationarityError(TvbandError):
    """Raised when a stationary approximation does not exist (|a(u)| >= 1)."""


class InfeasibleBandwidthError(TvbandError):
    """Raised when a bandwidth cannot be evaluated (too many empty windows)."""


class ConfigError(TvbandError):
    """Raised on invalid experiment configuration (unknown keys, bad values)."""


class FailureBudgetError(TvbandError):
    """Raised when more than the allowed fraction of replications failed."""
