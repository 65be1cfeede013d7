"""
Discretised doubly stochastic stable integrals.

The control measure P' x Lebesgue is replaced by (uniform measure on the
ensemble paths) x (Lebesgue on the cells of a SpatialGrid), so each
(path, cell) pair carries mass dx / n_paths and an independent SaS value.
One noise field is drawn per replicate and reused for every requested time,
which is what gives the simulated process its joint law.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from stablesim.errors import DimensionMismatchError, GridError, ParameterError
from stablesim.models import KernelVariant
from stablesim.engine.kernels import Kernel, step_geometry
from stablesim.sampling.stable import (
    DEFAULT_BLOCK_ROWS, DEFAULT_MAX_FIELD_ENTRIES, sample_noise_field,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProcessSample:
    times: np.ndarray
    values: np.ndarray
    kernel: KernelVariant
    replicate_id: int

    def value_at(self, t):
        hits = np.flatnonzero(np.isclose(self.times, t, rtol=0.0, atol=1e-9))
        if hits.size == 0:
            raise GridError(f"time {t} not in sample")
        return float(self.values[hits[0]])


@dataclass(frozen=True)
class NoiseSample:
    """Z(1..n_max) of one replicate"""
    values: np.ndarray
    replicate_id: int


def sample_matrix(samples):
    """(times, values) with values shaped (n_replicates, n_times)"""
    if not samples:
        raise ParameterError("no samples given")
    return samples[0].times, np.stack([s.values for s in samples])


def _cumulative_field(values):
    csum = np.zeros((values.shape[0], values.shape[1] + 1))
    np.cumsum(values, axis=1, out=csum[:, 1:])
    return csum


def _field_integral_to(csum, values, grid, x):
    """sum_j coverage_j((-X, x]) M_ij per row: the integral of the field up to x"""
    pos = (grid.clip(x) + grid.half_width) / grid.dx
    cell = np.minimum(np.floor(pos).astype(int), grid.n_cells - 1)
    cell = np.maximum(cell, 0)
    frac = pos - cell
    rows = np.arange(values.shape[0])
    return csum[rows, cell] + frac * values[rows, cell]


def integrate_field(kernel, ensemble, grid, field, times):
    """Y(t) = sum_{i,j} f_t(path_i, x_j) M_ij for each requested time"""
    out = np.empty(len(times))
    if not kernel.variant.is_step:
        for pos, t in enumerate(times):
            out[pos] = float(np.einsum('ij,ij->', kernel.local_time.at(t), field.values))
        return out

    csum = _cumulative_field(field.values)
    for pos, t in enumerate(times):
        lo, hi, sign = step_geometry(kernel, ensemble, t, n_rows=field.n_paths)
        upper = _field_integral_to(csum, field.values, grid, hi)
        lower = _field_integral_to(csum, field.values, grid, lo)
        out[pos] = float(np.sum(sign * (upper - lower)))
    return out


def _check_dimensions(kernel, ensemble, grid, times):
    if kernel.variant is KernelVariant.LEVY_DETERMINISTIC:
        if np.any(np.asarray(times) < 0):
            raise GridError("times must be nonnegative")
        if np.max(times) > grid.half_width:
            raise DimensionMismatchError(
                f"Levy kernel up to t={np.max(times)} needs half_width >= t, got {grid.half_width}")
        return
    if ensemble is None:
        raise ParameterError(f"the {kernel.variant.value} kernel needs a subordinator ensemble")
    ensemble.grid.indices_of(times)
    if kernel.variant is KernelVariant.LOCAL_TIME:
        lt = kernel.local_time
        if lt.ensemble is not ensemble or lt.x_grid != grid:
            raise DimensionMismatchError("local-time field was computed for another ensemble or grid")


def truncation_ledger(ensemble, grid, times):
    """E'[(|A_t| - X)_+] per time: kernel L1 mass lost to the spatial window"""
    if ensemble is None:
        return {float(t): 0.0 for t in times}
    return {float(t): ensemble.truncated_mass(t, grid.half_width) for t in times}


def simulate_process(kernel, ensemble, grid, times, spec, rng, n_replicates, threads=1,
                     field_source=None, block_rows=DEFAULT_BLOCK_ROWS,
                     max_entries=DEFAULT_MAX_FIELD_ENTRIES):
    """Independent replicates of the process at `times`.

    Replicate r uses the noise field of substream r (or field_source(r)), so
    the output is identical for any thread count.
    """
    if n_replicates < 1:
        raise ParameterError(f"n_replicates must be positive, got {n_replicates}")
    times = np.asarray(times, dtype=float)
    _check_dimensions(kernel, ensemble, grid, times)
    n_paths = ensemble.n_paths if ensemble is not None else 1

    for t, lost in truncation_ledger(ensemble, grid, times).items():
        if lost > 0:
            logger.info(f"truncation at t={t}: E'[(|A_t|-X)+] = {lost:.3e}")

    def one_replicate(r):
        if field_source is not None:
            field = field_source(r)
        else:
            field = sample_noise_field(grid, n_paths, spec, rng.substream(r),
                                       block_rows=block_rows, max_entries=max_entries)
        if field.values.shape != (n_paths, grid.n_cells):
            raise DimensionMismatchError(
                f"noise field {field.values.shape} does not match ({n_paths}, {grid.n_cells})")
        values = integrate_field(kernel, ensemble, grid, field, times)
        return ProcessSample(times, values, kernel.variant, r)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(one_replicate, range(n_replicates)))
    else:
        samples = [one_replicate(r) for r in range(n_replicates)]

    logger.debug(f"simulated {n_replicates} replicates of {kernel.variant.value} at {times.size} times")
    return samples


def simulate_noise(ensemble, grid, n_max, spec, rng, n_replicates, threads=1,
                   kernel=None, **kwargs):
    """Unit increments Z(n) = Y(n) - Y(n-1), n = 1..n_max, from one field per replicate"""
    kernel = kernel or Kernel.indicator()
    if kernel.variant not in (KernelVariant.INDICATOR, KernelVariant.SIGNED_INDICATOR):
        raise ParameterError("noise is defined for the indicator kernels")
    times = np.arange(int(n_max) + 1, dtype=float)
    samples = simulate_process(kernel, ensemble, grid, times, spec, rng, n_replicates,
                               threads=threads, **kwargs)
    return [NoiseSample(np.diff(s.values), s.replicate_id) for s in samples]
