import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from stablesim.errors import GridError, ParameterError

logger = logging.getLogger(__name__)

KS_ONE_PERCENT = 1.63


def ks_critical_value(n, m=None, coefficient=KS_ONE_PERCENT):
    """Asymptotic two-sample KS critical value; 1% level by default"""
    m = n if m is None else m
    if n < 1 or m < 1:
        raise ParameterError("sample sizes must be positive")
    return float(coefficient * np.sqrt((n + m) / (n * m)))


@dataclass(frozen=True)
class StationarityResult:
    distance: float
    per_shift: dict = field(default_factory=dict)
    n: int = 0

    @property
    def critical_value(self):
        return ks_critical_value(self.n)

    def as_dict(self):
        return {
            'distance': float(self.distance),
            'per_shift': {str(h): float(d) for h, d in self.per_shift.items()},
            'critical_value': self.critical_value,
            'n': int(self.n),
        }


def _column_lookup(times):
    times = np.asarray(times, dtype=float)

    def column(t):
        hits = np.flatnonzero(np.isclose(times, t, rtol=0.0, atol=1e-9))
        if hits.size == 0:
            raise GridError(f"time {t} was not simulated")
        return int(hits[0])
    return column


def stationarity_distance(values, times, t_span, shifts):
    """Max over shifts h and span times t of KS({Y(t+h) - Y(h)}, {Y(t)})"""
    values = np.asarray(values, dtype=float)
    column = _column_lookup(times)
    per_shift = {}
    for h in shifts:
        worst = 0.0
        for t in t_span:
            shifted = values[:, column(t + h)] - values[:, column(h)]
            base = values[:, column(t)]
            if np.array_equal(shifted, base):
                continue
            worst = max(worst, float(stats.ks_2samp(shifted, base).statistic))
        per_shift[float(h)] = worst
    distance = max(per_shift.values()) if per_shift else 0.0
    logger.debug(f"stationarity: KS distances {per_shift}")
    return StationarityResult(distance, per_shift, values.shape[0])


def pinned_ensemble(ensemble, times):
    """Broken control: the ensemble with A pinned to 0 at every positive time in `times`"""
    paths = np.array(ensemble.paths)
    for t in times:
        if t > 0:
            paths[:, ensemble.grid.index_of(t)] = 0.0
    return ensemble.with_paths(paths, method=f'{ensemble.method}+pinned')


def stationarity_times(t_span, shifts):
    """Every time the distance needs: t, h and t + h"""
    needed = {0.0}
    for h in shifts:
        needed.add(float(h))
        for t in t_span:
            needed.add(float(t))
            needed.add(float(t + h))
    return sorted(needed)
