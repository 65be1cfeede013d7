"""
Kernels f_t(omega', x) of the doubly stochastic integral, averaged over cells.
"""

from dataclasses import dataclass

import numpy as np

from stablesim.errors import ParameterError
from stablesim.models import KernelVariant


@dataclass(frozen=True)
class Kernel:
    variant: KernelVariant
    local_time: object = None   # LocalTimeField, LOCAL_TIME only

    def __post_init__(self):
        if self.variant is KernelVariant.LOCAL_TIME and self.local_time is None:
            raise ParameterError("the local-time kernel needs a LocalTimeField")

    @classmethod
    def indicator(cls):
        return cls(KernelVariant.INDICATOR)

    @classmethod
    def signed_indicator(cls):
        return cls(KernelVariant.SIGNED_INDICATOR)

    @classmethod
    def levy(cls):
        return cls(KernelVariant.LEVY_DETERMINISTIC)

    @classmethod
    def from_local_time(cls, field):
        return cls(KernelVariant.LOCAL_TIME, field)


def step_geometry(kernel, ensemble, t, n_rows=None):
    """Interval [lo, hi] and sign of a step kernel for every path.

    [a, b] is read as [b, a] when b < a. The deterministic Levy kernel is
    the same interval [0, t] on every row.
    """
    variant = kernel.variant
    if variant is KernelVariant.LEVY_DETERMINISTIC:
        rows = n_rows if n_rows is not None else (ensemble.n_paths if ensemble is not None else 1)
        lo = np.zeros(rows)
        hi = np.full(rows, float(t))
        return lo, hi, np.ones(rows)
    a = ensemble.at(t)
    lo = np.minimum(a, 0.0)
    hi = np.maximum(a, 0.0)
    if variant is KernelVariant.SIGNED_INDICATOR:
        return lo, hi, np.sign(a)
    if variant is KernelVariant.INDICATOR:
        return lo, hi, np.ones_like(a)
    raise ParameterError(f"{variant.value} is not a step kernel")


def kernel_matrix(kernel, ensemble, grid, t):
    """Cell-averaged kernel values, shape (n_paths, n_cells)"""
    if kernel.variant is KernelVariant.LOCAL_TIME:
        return np.asarray(kernel.local_time.at(t))
    lo, hi, sign = step_geometry(kernel, ensemble, t)
    return sign[:, None] * grid.coverage(lo, hi)


def evaluate_kernel(kernel, ensemble, path_index, t, x_cell, grid):
    """Cell average of f_t(path, .) over cell x_cell.

    Step kernels give the covered fraction of the cell (with the sign for
    the signed indicator); the local-time kernel gives the stored field value.
    """
    if not 0 <= x_cell < grid.n_cells:
        raise ParameterError(f"cell {x_cell} outside grid of {grid.n_cells} cells")
    if kernel.variant is KernelVariant.LOCAL_TIME:
        return float(kernel.local_time.at(t)[path_index, x_cell])
    if kernel.variant is KernelVariant.LEVY_DETERMINISTIC:
        lo, hi, sign = 0.0, float(t), 1.0
    else:
        a = float(ensemble.at(t)[path_index])
        lo, hi = min(a, 0.0), max(a, 0.0)
        sign = float(np.sign(a)) if kernel.variant is KernelVariant.SIGNED_INDICATOR else 1.0
    left, right = grid.edges[x_cell], grid.edges[x_cell + 1]
    covered = max(0.0, min(hi, right) - max(lo, left)) / grid.dx
    return sign * min(covered, 1.0)
