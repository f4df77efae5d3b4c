"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: input problems exit 2, config
problems exit 3, anything else exits 4.
"""


class DriftwatchError(Exception):
    """Base class for all driftwatch errors."""


class InputError(DriftwatchError):
    """Bad runtime input: malformed data, wrong shapes, empty streams."""


class ConfigError(DriftwatchError):
    """Invalid or inconsistent configuration values."""


class GenerationError(DriftwatchError):
    """A synthetic-data generator could not produce a valid draw."""


class ScoringError(DriftwatchError):
    """A score is undefined for the given state (e.g. empty active set)."""
