"""
Checks of the two degenerate cases.

alpha = 2: the indicator process is centred Gaussian with
Cov(Y(s), Y(t)) = 2 E'[Lebesgue([0, A_s] cap [0, A_t])].
H' = 1: the process is SaS Levy motion, with i.i.d. increments of
characteristic function exp(-dt |theta|^alpha).
"""

import logging
from dataclasses import dataclass

import numpy as np

from stablesim.errors import GridError, ParameterError

logger = logging.getLogger(__name__)

DEFAULT_COVARIANCE_PAIRS = (
    (0.5, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (0.5, 2.0),
    (1.0, 3.0), (2.0, 3.0), (3.0, 3.0), (1.0, 5.0), (5.0, 5.0),
)
DEFAULT_LEVY_THETAS = (0.5, 1.0, 2.0)


def _column(times, t):
    hits = np.flatnonzero(np.isclose(np.asarray(times, dtype=float), t, rtol=0.0, atol=1e-9))
    if hits.size == 0:
        raise GridError(f"time {t} was not simulated")
    return int(hits[0])


@dataclass(frozen=True)
class CovarianceComparison:
    s: float
    t: float
    empirical: float
    stderr: float
    oracle: float

    @property
    def relative_error(self):
        if self.oracle == 0:
            return 0.0 if self.empirical == 0 else float('inf')
        return abs(self.empirical - self.oracle) / abs(self.oracle)

    def as_dict(self):
        return {
            's': self.s, 't': self.t,
            'empirical': float(self.empirical),
            'stderr': float(self.stderr),
            'oracle': float(self.oracle),
            'relative_error': float(self.relative_error),
        }


def covariance_oracle(ensemble, grid, s, t):
    """2 E'[Lebesgue([0, A_s] cap [0, A_t])] restricted to the spatial window"""
    a_s = grid.clip(ensemble.at(s))
    a_t = grid.clip(ensemble.at(t))
    overlap = np.clip(np.minimum(np.maximum(a_s, 0), np.maximum(a_t, 0))
                      - np.maximum(np.minimum(a_s, 0), np.minimum(a_t, 0)), 0.0, None)
    return float(2.0 * np.mean(overlap))


def gaussian_covariance_check(values, times, ensemble, grid, pairs=DEFAULT_COVARIANCE_PAIRS):
    values = np.asarray(values, dtype=float)
    out = []
    for s, t in pairs:
        ys = values[:, _column(times, s)]
        yt = values[:, _column(times, t)]
        product = (ys - ys.mean()) * (yt - yt.mean())
        n = product.size
        out.append(CovarianceComparison(
            s=float(s), t=float(t),
            empirical=float(product.sum() / (n - 1)),
            stderr=float(np.std(product, ddof=1) / np.sqrt(n)),
            oracle=covariance_oracle(ensemble, grid, s, t),
        ))
    return out


@dataclass(frozen=True)
class IncrementCharCheck:
    theta: float
    empirical: float
    stderr: float
    expected: float

    @property
    def zscore(self):
        if self.stderr == 0:
            return 0.0 if self.empirical == self.expected else float('inf')
        return abs(self.empirical - self.expected) / self.stderr

    def as_dict(self):
        return {
            'theta': float(self.theta),
            'empirical': float(self.empirical),
            'stderr': float(self.stderr),
            'expected': float(self.expected),
            'zscore': float(self.zscore),
        }


def levy_increment_check(values, times, alpha, thetas=DEFAULT_LEVY_THETAS, dt=1.0):
    """ECF of pooled increments Y(t + dt) - Y(t) against exp(-dt |theta|^alpha)"""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    starts = [t for t in times if np.any(np.isclose(times, t + dt, rtol=0.0, atol=1e-9))]
    if not starts:
        raise ParameterError(f"no pair of simulated times is {dt} apart")
    increments = np.concatenate([
        values[:, _column(times, t + dt)] - values[:, _column(times, t)] for t in starts
    ])
    checks = []
    for theta in thetas:
        cosines = np.cos(theta * increments)
        checks.append(IncrementCharCheck(
            theta=float(theta),
            empirical=float(np.mean(cosines)),
            stderr=float(np.std(cosines, ddof=1) / np.sqrt(cosines.size)),
            expected=float(np.exp(-dt * abs(theta) ** alpha)),
        ))
    logger.debug(f"levy increments: {len(starts)} lags pooled, {increments.size} increments")
    return checks
