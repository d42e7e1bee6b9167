"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A function argument violates its documented domain."""


class ConfigError(ValueError):
    """A configuration file or configuration object is invalid."""


class UnsupportedModeError(ParameterError):
    """The requested operation is not defined for this signaling mode."""
