"""
Ensembles of subordinator paths.

An ensemble stands in for the path space (Omega', P'): the uniform measure on
its n_paths rows replaces P' everywhere downstream. Paths are read-only once
the ensemble exists.
"""

import logging
from dataclasses import dataclass

import numpy as np

from stablesim.errors import DimensionMismatchError, ParameterError
from stablesim.models import SubordinatorKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubordinatorEnsemble:
    spec: object
    grid: object
    paths: np.ndarray
    seed: int
    method: str = ''

    def __post_init__(self):
        expected = self.grid.n_steps + 1
        if self.paths.ndim != 2 or self.paths.shape[1] != expected:
            raise DimensionMismatchError(
                f"paths of shape {self.paths.shape} do not match {expected} grid points")
        if self.paths.shape[0] < 1:
            raise ParameterError("an ensemble needs at least one path")
        self.paths.setflags(write=False)

    @property
    def n_paths(self):
        return self.paths.shape[0]

    def at(self, t):
        """A_t across paths"""
        return self.paths[:, self.grid.index_of(t)]

    def columns(self, times):
        return self.paths[:, self.grid.indices_of(times)]

    def mean_abs(self, t):
        """E'|A_t| under the empirical path measure"""
        return float(np.mean(np.abs(self.at(t))))

    def running_extremes(self):
        return self.paths.max(axis=1), self.paths.min(axis=1)

    def max_abs(self):
        return np.abs(self.paths).max(axis=1)

    def truncated_mass(self, t, half_width):
        """E'[(|A_t| - X)_+]: L1 mass of the indicator kernel lost outside [-X, X]"""
        return float(np.mean(np.clip(np.abs(self.at(t)) - half_width, 0.0, None)))

    def with_paths(self, paths, method=None):
        return SubordinatorEnsemble(self.spec, self.grid, np.array(paths, dtype=float),
                                    self.seed, method or self.method)

    def head(self, n_paths):
        """Ensemble of the first n_paths rows"""
        return self.with_paths(self.paths[:n_paths])

    def describe(self):
        return {
            'spec': self.spec.describe(),
            'grid': self.grid.describe(),
            'n_paths': int(self.n_paths),
            'seed': str(self.seed),
            'method': self.method,
        }


def synthesis_method(spec, grid, dense_threshold=64):
    """Name of the method generate_ensemble will use for this spec and grid"""
    from stablesim.subordinators.fbm import synthesis_plan

    if spec.kind is SubordinatorKind.FBM:
        return synthesis_plan(spec.hurst, grid.n_steps, dense_threshold)[0]
    return 'increments'


def generate_ensemble(spec, grid, n_paths, rng, dense_threshold=64):
    from stablesim.subordinators.fbm import sample_fbm_ensemble
    from stablesim.subordinators.levy import sample_levy_ensemble

    if int(n_paths) != n_paths or n_paths < 1:
        raise ParameterError(f"n_paths must be a positive integer, got {n_paths}")
    if spec.kind is SubordinatorKind.FBM:
        return sample_fbm_ensemble(spec, grid, int(n_paths), rng, dense_threshold=dense_threshold)
    return sample_levy_ensemble(spec, grid, int(n_paths), rng)


@dataclass(frozen=True)
class RecurrenceReport:
    level: float
    frac_exceed_up: float
    frac_exceed_down: float
    n_paths: int

    @property
    def asymmetry(self):
        return abs(self.frac_exceed_up - self.frac_exceed_down)

    def as_dict(self):
        return {
            'level': float(self.level),
            'frac_exceed_up': float(self.frac_exceed_up),
            'frac_exceed_down': float(self.frac_exceed_down),
            'n_paths': int(self.n_paths),
        }


def recurrence_check(ensemble, level):
    """Fractions of paths reaching +level and -level by t_max"""
    if level < 0:
        raise ParameterError(f"level must be nonnegative, got {level}")
    running_max, running_min = ensemble.running_extremes()
    return RecurrenceReport(
        level=float(level),
        frac_exceed_up=float(np.mean(running_max >= level)),
        frac_exceed_down=float(np.mean(running_min <= -level)),
        n_paths=ensemble.n_paths,
    )
