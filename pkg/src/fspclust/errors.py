"""Exception hierarchy shared by all stages of the pipeline."""


class FspClustError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(FspClustError):
    """Invalid run configuration or parameter value."""


class DataError(FspClustError):
    """Input data that cannot be used (bad schema, empty collection, ...)."""


class SchemaError(DataError):
    """A required CSV column is missing."""


class ResourceLimitError(FspClustError):
    """The miner exceeded its frontier budget and truncation was not allowed."""


class NoFeasibleThresholds(FspClustError):
    """No threshold triple reaches the requested recall floor.

    ``best`` carries the infeasible grid point with the highest estimated
    recall so callers can report how close the search came.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class TruncatedPatternSetError(FspClustError):
    """Closedness cannot be certified on a pattern set cut short by mining limits."""
