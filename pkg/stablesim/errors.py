"""
Exception hierarchy for stablesim.

Every error raised on purpose by the package derives from StableSimError, so
the CLI can tell expected failures (bad parameters, exhausted budgets) apart
from bugs.
"""


class StableSimError(Exception):
    """Base class for all stablesim errors"""


class ParameterError(StableSimError, ValueError):
    """A parameter lies outside its admissible range"""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [message])


class GridError(StableSimError, ValueError):
    """A time or space point is not on the requested grid"""


class MemoryBudgetError(StableSimError):
    """An allocation would exceed the configured entry budget"""


class DimensionMismatchError(StableSimError, ValueError):
    """Ensemble, grid and noise field do not agree in shape"""


class InsufficientReplicatesError(StableSimError, ValueError):
    """Too few replicates for a Monte Carlo estimate"""


class DegenerateSampleError(StableSimError, ValueError):
    """A sample carries no information (for example all zeros)"""


class TailConstantsError(StableSimError):
    """Fitted tail constants violate their defining inequalities"""


class CacheError(StableSimError):
    """A cache envelope is missing, truncated or has an unexpected header"""


class ConfigError(StableSimError):
    """A run config failed validation; carries every violation found"""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__('; '.join(self.violations))


class ExperimentError(StableSimError):
    """A module error raised while running a named experiment"""

    def __init__(self, experiment, cause):
        self.experiment = experiment
        self.cause = cause
        super().__init__(f"experiment '{experiment}' failed: {cause}")
