"""
Discretised local time (occupation density) of subordinator paths.

Within each time step the path is linearly interpolated, so a move from a to
b spends time in every cell between them in proportion to the overlap. The
deposit conserves time exactly: sum_j L[i, k, j] dx = t_k minus whatever
fell outside the spatial window.
"""

import logging
from dataclasses import dataclass

import numpy as np

from stablesim.errors import MemoryBudgetError

logger = logging.getLogger(__name__)

DEFAULT_MAX_LOCAL_TIME_ENTRIES = 50_000_000
TRUNCATION_WARN_FRACTION = 1e-3


@dataclass(frozen=True)
class LocalTimeField:
    ensemble: object
    x_grid: object
    time_indices: np.ndarray
    values: np.ndarray      # (n_paths, len(time_indices), n_cells), units time / length
    truncated: np.ndarray   # (n_paths, len(time_indices)) time spent outside the window

    def position(self, t):
        k = self.ensemble.grid.index_of(t)
        hits = np.flatnonzero(self.time_indices == k)
        if hits.size == 0:
            raise KeyError(f"local time at t={t} was not retained")
        return int(hits[0])

    def at(self, t):
        """L(t, x_j) for every path, shape (n_paths, n_cells)"""
        return self.values[:, self.position(t), :]

    def occupation(self, t):
        """sum_j L dx per path; equals t minus the truncated time"""
        return self.at(t).sum(axis=1) * self.x_grid.dx


def _step_deposit(a, b, x_grid, dt):
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    width = hi - lo
    overlap = np.clip(np.minimum(hi[:, None], x_grid.edges[None, 1:])
                      - np.maximum(lo[:, None], x_grid.edges[None, :-1]), 0.0, None)
    share = np.zeros_like(overlap)
    moving = width > 0
    share[moving] = overlap[moving] / width[moving, None] * dt

    # A path that does not move spends the whole step in one cell
    still = np.flatnonzero(~moving)
    if still.size:
        cells = x_grid.locate(a[still])
        inside = cells >= 0
        share[still[inside], cells[inside]] = dt
    return share


def compute_local_time(ensemble, x_grid, times=None, max_entries=DEFAULT_MAX_LOCAL_TIME_ENTRIES):
    grid = ensemble.grid
    if times is None:
        time_indices = np.arange(grid.n_steps + 1)
    else:
        time_indices = np.unique(grid.indices_of(times))

    n_paths = ensemble.n_paths
    entries = n_paths * time_indices.size * x_grid.n_cells
    if entries > max_entries:
        raise MemoryBudgetError(
            f"local time field of {entries} entries exceeds budget {max_entries}; retain fewer times")

    values = np.zeros((n_paths, time_indices.size, x_grid.n_cells))
    truncated = np.zeros((n_paths, time_indices.size))
    slot = {int(k): pos for pos, k in enumerate(time_indices)}

    occupation = np.zeros((n_paths, x_grid.n_cells))
    lost = np.zeros(n_paths)
    for k in range(1, int(time_indices.max()) + 1):
        share = _step_deposit(ensemble.paths[:, k - 1], ensemble.paths[:, k], x_grid, grid.dt)
        occupation += share
        lost += grid.dt - share.sum(axis=1)
        if k in slot:
            values[:, slot[k], :] = occupation / x_grid.dx
            truncated[:, slot[k]] = lost

    horizon = grid.points[int(time_indices.max())]
    if horizon > 0:
        lost_fraction = float(np.mean(lost)) / horizon
        if lost_fraction > TRUNCATION_WARN_FRACTION:
            logger.warning(f"{lost_fraction:.3%} of occupation time falls outside "
                           f"[-{x_grid.half_width}, {x_grid.half_width}]")

    values.setflags(write=False)
    truncated.setflags(write=False)
    return LocalTimeField(ensemble, x_grid, time_indices, values, truncated)
