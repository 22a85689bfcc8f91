"""Exception types shared across the package."""


class ChunkLabError(Exception):
    """Base class for all chunklab errors."""


class ConfigError(ChunkLabError, ValueError):
    """A configuration value or combination is invalid."""


class InputError(ChunkLabError, ValueError):
    """An input value is outside the operation's domain."""


class NumericFailure(ChunkLabError, RuntimeError):
    """The dynamics produced non-finite values; the trial is aborted."""


class GraphFormatError(ChunkLabError, ValueError):
    """A graph file failed to parse or violates a structural invariant."""
