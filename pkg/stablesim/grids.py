"""
Time and space discretisations shared by every module.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from stablesim.errors import GridError, ParameterError

_ON_GRID_RTOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Equispaced times t_k = k * t_max / n_steps, k = 0..n_steps"""
    t_max: float
    n_steps: int

    def __post_init__(self):
        if not self.t_max > 0:
            raise ParameterError(f"t_max must be positive, got {self.t_max}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ParameterError(f"n_steps must be a positive integer, got {self.n_steps}")

    @property
    def dt(self):
        return self.t_max / self.n_steps

    @cached_property
    def points(self):
        pts = np.linspace(0.0, self.t_max, self.n_steps + 1)
        pts.setflags(write=False)
        return pts

    def index_of(self, t):
        k = int(round(t / self.dt))
        if k < 0 or k > self.n_steps or abs(k * self.dt - t) > _ON_GRID_RTOL * max(1.0, abs(t)):
            raise GridError(f"time {t} is not a point of {self}")
        return k

    def indices_of(self, times):
        return np.array([self.index_of(float(t)) for t in np.atleast_1d(times)], dtype=int)

    def snap(self, t):
        """Grid point nearest to t, clamped to [0, t_max]"""
        k = min(max(int(np.floor(t / self.dt + 0.5)), 0), self.n_steps)
        return float(self.points[k])

    def contains(self, t):
        try:
            self.index_of(t)
        except GridError:
            return False
        return True

    def describe(self):
        return {'t_max': float(self.t_max), 'n_steps': int(self.n_steps)}


def lattice_grid(horizon, steps_per_unit=1):
    """Grid holding the integer times 0..horizon (used by noise-level diagnostics)"""
    return TimeGrid(float(horizon), int(horizon) * int(steps_per_unit))


@dataclass(frozen=True)
class SpatialGrid:
    """Symmetric truncation [-X, X] of the real line in cells of width dx.

    0 is always a cell boundary, so unions of cells reproduce [0, a] exactly
    whenever a is itself a boundary.
    """
    half_width: float
    dx: float

    def __post_init__(self):
        if not self.half_width > 0 or not self.dx > 0:
            raise ParameterError(f"half_width and dx must be positive, got {self.half_width}, {self.dx}")
        n_half = round(self.half_width / self.dx)
        if n_half < 1 or abs(n_half * self.dx - self.half_width) > _ON_GRID_RTOL * self.half_width:
            raise GridError(f"half_width {self.half_width} is not a multiple of dx {self.dx}")

    @classmethod
    def from_half_width(cls, half_width, cells_per_half):
        return cls(float(half_width), float(half_width) / int(cells_per_half))

    @property
    def n_half(self):
        return int(round(self.half_width / self.dx))

    @property
    def n_cells(self):
        return 2 * self.n_half

    @cached_property
    def edges(self):
        e = np.arange(-self.n_half, self.n_half + 1) * self.dx
        e.setflags(write=False)
        return e

    @cached_property
    def midpoints(self):
        m = 0.5 * (self.edges[:-1] + self.edges[1:])
        m.setflags(write=False)
        return m

    def locate(self, x):
        """Cell index of each x (cells are half-open [left, right)); -1 outside the grid"""
        x = np.asarray(x, dtype=float)
        idx = np.floor((x + self.half_width) / self.dx).astype(int)
        idx = np.where(x == self.half_width, self.n_cells - 1, idx)
        return np.where((idx >= 0) & (idx < self.n_cells), idx, -1)

    def coverage(self, lo, hi):
        """Fraction of every cell covered by [lo_i, hi_i]; shape (len(lo), n_cells)"""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))[:, None]
        hi = np.atleast_1d(np.asarray(hi, dtype=float))[:, None]
        overlap = np.minimum(hi, self.edges[None, 1:]) - np.maximum(lo, self.edges[None, :-1])
        return np.clip(overlap / self.dx, 0.0, 1.0)

    def cell_mass(self, n_paths=1):
        """Control mass (P' x Lebesgue) of one (path, cell) pair"""
        return self.dx / n_paths

    def clip(self, x):
        return np.clip(x, -self.half_width, self.half_width)

    def describe(self):
        return {'half_width': float(self.half_width), 'dx': float(self.dx)}

    def refined(self):
        """Same window, cells of half the width"""
        return SpatialGrid(self.half_width, self.dx / 2.0)
