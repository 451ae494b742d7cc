"""Exception types shared across the package."""


class FdbssError(Exception):
    """Base class for all package errors."""


class ConfigError(FdbssError):
    """Invalid configuration: bad field value, unknown key, or dimension mismatch."""


class DegenerateFrame(FdbssError):
    """Observation frame is rank deficient (too short or degenerate channels)."""


class SiMatchFailure(FdbssError):
    """No recovered component correlates with a known self-interference stream."""
