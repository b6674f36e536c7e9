"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid scenario or parameter value. ``key`` names the offending field."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class DivergenceError(RuntimeError):
    """RLS covariance exceeded its ceiling."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NonConcaveError(RuntimeError):
    """Oracle grid search found several separated maxima."""


class VehicleStopped(Exception):
    """Terminal event: the ABS plant reached the stop speed."""
