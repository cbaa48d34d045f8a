"""Shared exception types."""


class ConfigurationError(ValueError):
    """A build-time parameter is structurally invalid (bad polynomial, bad sizes)."""


class EstimationError(RuntimeError):
    """A Monte-Carlo estimate hit a guard (e.g. division by a vanishing quantity)."""
