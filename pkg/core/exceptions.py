"""
Exception hierarchy shared by every app.

Each class carries the process exit status the management commands use
when the error reaches the command line.
"""


class NesprindtError(Exception):
    """Base class for all domain errors."""
    exit_code = 1


class ConfigError(NesprindtError):
    """Invalid run configuration or command-line usage."""
    exit_code = 1


class DataError(NesprindtError):
    """Input data that cannot be loaded or does not fit the configuration."""
    exit_code = 2


class SamplingError(DataError):
    """A sampling request that cannot be satisfied by the data."""


class ScoringError(DataError):
    """An accuracy that is undefined for the given labels."""


class EmptyResultError(NesprindtError):
    """Every candidate tree was filtered out."""
    exit_code = 3
