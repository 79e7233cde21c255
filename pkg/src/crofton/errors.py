"""Shared exception types."""


class SimulationAbort(RuntimeError):
    """A runtime guard tripped (radius or jump cap); indicates pathological input."""


class ConfigError(ValueError):
    """Invalid configuration file or command-line parameters."""


class InsufficientConditioningEvents(RuntimeError):
    """Too few conditioning events to report a verdict; raise replications."""
