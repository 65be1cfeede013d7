"""
Self-similarity exponent from quantile scaling.

|Y| has no finite alpha-th moment when alpha < 2, so the exponent is read off
the slope of log q_p(|Y(t)|) against log t instead of a moment regression.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from stablesim.errors import DegenerateSampleError, InsufficientReplicatesError, ParameterError

logger = logging.getLogger(__name__)

MIN_TIMES = 5
MIN_DECADES = 2.0
MIN_REPLICATES = 1000


@dataclass(frozen=True)
class ExponentFit:
    H_hat: float
    stderr: float
    p: float
    times: tuple
    r_squared: float
    intercept: float = 0.0

    def as_dict(self):
        return {
            'H_hat': float(self.H_hat),
            'stderr': float(self.stderr),
            'p': float(self.p),
            'times': [float(t) for t in self.times],
            'r_squared': float(self.r_squared),
            'intercept': float(self.intercept),
        }


# smallest n_steps for which t_max / 100 reaches a positive grid time
MIN_DEFAULT_STEPS = 100


def default_selfsim_times(grid, n_times=8):
    """Up to n_times grid points, log-spaced over the two decades ending at t_max.

    The first point is the largest grid time not above t_max / 100, so the span
    is never short of two decades.
    """
    k0 = grid.n_steps // MIN_DEFAULT_STEPS
    if k0 < 1:
        raise ParameterError(f"default self-similarity times need n_steps >= {MIN_DEFAULT_STEPS}, "
                             f"got {grid.n_steps}; set selfsim_times explicitly")
    t0 = float(grid.points[k0])
    snapped = sorted({grid.snap(t) for t in np.geomspace(t0, grid.t_max, n_times)})
    return tuple(snapped)


def estimate_selfsim_exponent(values, times, p=0.5, min_replicates=MIN_REPLICATES):
    """Least-squares slope of log q_p(|Y(t)|) on log t.

    values has shape (n_replicates, len(times)).
    """
    values = np.asarray(values, dtype=float)
    times = np.asarray(times, dtype=float)
    if not 0.0 < p < 1.0:
        raise ParameterError(f"quantile p must lie in (0, 1), got {p}")
    if values.ndim != 2 or values.shape[1] != times.size:
        raise ParameterError(f"values of shape {values.shape} do not match {times.size} times")
    if times.size < MIN_TIMES:
        raise ParameterError(f"an exponent fit needs at least {MIN_TIMES} times, got {times.size}")
    if np.any(times <= 0):
        raise ParameterError("exponent fits need strictly positive times")
    if np.log10(times.max() / times.min()) < MIN_DECADES - 1e-9:
        raise ParameterError(f"fit times must span {MIN_DECADES:g} decades, got {times.min()}..{times.max()}")
    if values.shape[0] < min_replicates:
        raise InsufficientReplicatesError(
            f"{values.shape[0]} replicates per time, at least {min_replicates} needed")

    quantiles = np.quantile(np.abs(values), p, axis=0)
    if np.any(quantiles <= 0):
        zero_at = times[quantiles <= 0]
        raise DegenerateSampleError(f"the {p}-quantile of |Y| vanishes at t={zero_at.tolist()}")

    fit = stats.linregress(np.log(times), np.log(quantiles))
    logger.debug(f"selfsim fit: slope {fit.slope:.4f} +/- {fit.stderr:.4f}, R^2 {fit.rvalue ** 2:.5f}")
    return ExponentFit(
        H_hat=float(fit.slope),
        stderr=float(fit.stderr),
        p=float(p),
        times=tuple(float(t) for t in times),
        r_squared=float(fit.rvalue ** 2),
        intercept=float(fit.intercept),
    )
