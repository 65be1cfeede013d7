"""
Divergence of the occupation sums that certify a conservative flow.

S_N(x) = sum_{n<N} E' 1{x in [A_n, A_{n+1}]} grows without bound at every x
when the subordinator is recurrent; for fractional Brownian motion it grows
like N^(1 - H').
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from stablesim.errors import GridError, ParameterError

logger = logging.getLogger(__name__)

DEFAULT_PROBES = (0.0, -0.5, 0.5)
FIT_DECADES = 2.0
FIT_POINTS = 20


@dataclass(frozen=True)
class ConservativityCurve:
    probes: tuple
    n_values: np.ndarray    # 0..N
    sums: np.ndarray        # (n_probes, N + 1), sums[:, 0] == 0
    stderr: np.ndarray      # per probe, of S at the last N
    growth: np.ndarray      # fitted growth exponent per probe
    growth_stderr: np.ndarray

    @property
    def horizon(self):
        return int(self.n_values[-1])

    def final(self):
        return self.sums[:, -1]

    def monotone(self):
        return bool(np.all(np.diff(self.sums, axis=1) >= 0))

    def rows(self, checkpoints=None):
        checkpoints = self.checkpoints() if checkpoints is None else checkpoints
        return [
            {'x': float(x), 'N': int(n), 'S': float(self.sums[i, n])}
            for i, x in enumerate(self.probes) for n in checkpoints
        ]

    def checkpoints(self):
        if self.horizon < 1:
            return [0]
        grid = np.unique(np.round(np.geomspace(1, self.horizon, 40)).astype(int))
        return [0] + grid.tolist()


def growth_exponent(n_values, sums, decades=FIT_DECADES, points=FIT_POINTS):
    """Slope of log S_N on log N over the last `decades` decades of N"""
    n_max = int(n_values[-1])
    start = max(1.0, n_max / 10.0 ** decades)
    ns = np.unique(np.round(np.geomspace(start, n_max, points)).astype(int))
    s = np.asarray(sums)[ns]
    keep = s > 0
    if keep.sum() < 3:
        return float('nan'), float('nan')
    fit = stats.linregress(np.log(ns[keep]), np.log(s[keep]))
    return float(fit.slope), float(fit.stderr)


def conservativity_sum(ensemble, probes=DEFAULT_PROBES, N=10_000):
    if int(N) != N or N < 0:
        raise ParameterError(f"N must be a nonnegative integer, got {N}")
    N = int(N)
    probes = tuple(float(x) for x in probes)
    n_values = np.arange(N + 1)
    sums = np.zeros((len(probes), N + 1))
    if N == 0:
        zeros = np.zeros(len(probes))
        return ConservativityCurve(probes, n_values, sums, zeros, np.full(len(probes), np.nan),
                                   np.full(len(probes), np.nan))

    indices = ensemble.grid.indices_of(n_values.astype(float))
    lattice = ensemble.paths[:, indices]
    x = np.asarray(probes)[None, :]

    counts = np.zeros((ensemble.n_paths, len(probes)))
    for n in range(N):
        a, b = lattice[:, n][:, None], lattice[:, n + 1][:, None]
        counts += (x >= np.minimum(a, b)) & (x <= np.maximum(a, b))
        sums[:, n + 1] = counts.mean(axis=0)

    stderr = counts.std(axis=0, ddof=1) / np.sqrt(ensemble.n_paths) if ensemble.n_paths > 1 \
        else np.zeros(len(probes))
    fits = [growth_exponent(n_values, row) for row in sums]
    growth = np.array([f[0] for f in fits])
    growth_stderr = np.array([f[1] for f in fits])
    logger.info(f"conservativity: S_{N} = {np.round(sums[:, -1], 3).tolist()}, growth {np.round(growth, 3).tolist()}")
    return ConservativityCurve(probes, n_values, sums, stderr, growth, growth_stderr)


def check_probes_on_grid(probes, grid):
    """Probes must fall inside the spatial window"""
    outside = [x for x in probes if abs(x) > grid.half_width]
    if outside:
        raise GridError(f"probes {outside} lie outside [-{grid.half_width}, {grid.half_width}]")
