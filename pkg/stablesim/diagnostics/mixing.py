"""
Mixing of the indicator noise.

The unit-increment kernel takes values in {-1, 0, 1}, so the compact set of
the mixing criterion is K = {-1, 1} with any eps in (0, 1), and the measure
that must vanish is

    mu_n = (P' x Lebesgue){(w, x): x in [0, A_1], x in [A_n, A_{n+1}]}.

mu_n is computed per path by interval intersection, and compared with the
three-term analytic bound built from tail constants of A_1.
"""

import logging
from dataclasses import dataclass

import numpy as np

from stablesim.errors import ParameterError, TailConstantsError

logger = logging.getLogger(__name__)

SAFETY_FACTOR = 1.1
M_GRID_BOUNDS = (0.1, 100.0)
M_GRID_POINTS = 50


def default_m_grid():
    return np.geomspace(M_GRID_BOUNDS[0], M_GRID_BOUNDS[1], M_GRID_POINTS)


@dataclass(frozen=True)
class TailConstants:
    """P'(A_1 > M) <= c1 M^-beta and E'(A_1 - M)_+ <= c2 M^(1-beta) on m_grid"""
    c1: float
    c2: float
    beta: float
    m_grid: tuple

    def as_dict(self):
        return {
            'c1': float(self.c1),
            'c2': float(self.c2),
            'beta': float(self.beta),
            'm_min': float(min(self.m_grid)),
            'm_max': float(max(self.m_grid)),
            'm_points': len(self.m_grid),
        }


@dataclass(frozen=True)
class MixingCurve:
    n: np.ndarray
    mu: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    bound_m: np.ndarray
    constants: TailConstants

    @property
    def bound_holds(self):
        return bool(np.all(self.mu <= self.bound))

    def decay_ratio(self):
        """mu at the last n over mu at n = 1"""
        if self.mu[0] <= 0:
            return 0.0
        return float(self.mu[-1] / self.mu[0])

    def rows(self):
        return [
            {'n': int(n), 'mu': float(m), 'stderr': float(s), 'bound': float(b)}
            for n, m, s, b in zip(self.n, self.mu, self.stderr, self.bound)
        ]


def _tail_terms(a1, m_grid):
    a1 = np.asarray(a1, dtype=float)
    tail = np.array([np.mean(a1 > m) for m in m_grid])
    excess = np.array([np.mean(np.clip(a1 - m, 0.0, None)) for m in m_grid])
    return tail, excess


def fit_tail_constants(ensemble, beta=None, m_grid=None, safety=SAFETY_FACTOR):
    """Smallest constants satisfying both tail inequalities on m_grid, times `safety`"""
    beta = ensemble.spec.tail_index if beta is None else float(beta)
    m_grid = default_m_grid() if m_grid is None else np.asarray(m_grid, dtype=float)
    if np.any(m_grid <= 0):
        raise ParameterError("truncation levels must be positive")
    tail, excess = _tail_terms(ensemble.at(1.0), m_grid)
    c1 = safety * float(np.max(tail * m_grid ** beta))
    c2 = safety * float(np.max(excess * m_grid ** (beta - 1.0)))
    if not (c1 > 0 and c2 > 0):
        raise TailConstantsError(f"A_1 has no mass above {m_grid.min()}; cannot fit tail constants")
    return TailConstants(c1, c2, beta, tuple(float(m) for m in m_grid))


def validate_tail_constants(constants, ensemble):
    tail, excess = _tail_terms(ensemble.at(1.0), constants.m_grid)
    m = np.asarray(constants.m_grid)
    failures = []
    bad_tail = tail > constants.c1 * m ** -constants.beta
    bad_excess = excess > constants.c2 * m ** (1.0 - constants.beta)
    if np.any(bad_tail):
        failures.append(f"P'(A_1 > M) > c1 M^-beta at M = {m[bad_tail].tolist()}")
    if np.any(bad_excess):
        failures.append(f"integral tail > c2 M^(1-beta) at M = {m[bad_excess].tolist()}")
    if failures:
        raise TailConstantsError('; '.join(failures))


def mixing_bound_at(n, m, constants, h_prime, abs_a1):
    """2 c2 M^(1-beta) + 4 M P'(|A_1| <= M / n^H') + 4 M c1 M^-beta"""
    beta = constants.beta
    small = float(np.mean(np.asarray(abs_a1) <= m / float(n) ** h_prime))
    return (2.0 * constants.c2 * m ** (1.0 - beta)
            + 4.0 * m * small
            + 4.0 * m * constants.c1 * m ** -beta)


def _best_bound(n, constants, h_prime, abs_a1):
    values = [mixing_bound_at(n, m, constants, h_prime, abs_a1) for m in constants.m_grid]
    best = int(np.argmin(values))
    return float(values[best]), float(constants.m_grid[best])


def mixing_bound(n, constants, h_prime, ensemble):
    """Analytic bound on mu_n, minimised over the M-grid of the constants"""
    validate_tail_constants(constants, ensemble)
    return _best_bound(n, constants, h_prime, np.abs(ensemble.at(1.0)))[0]


def bound_vanishing_sequence(constants, h_prime, abs_a1, exponents=range(2, 13)):
    """Bound at M = n^(H'/4) along n = 10^k; should decrease to 0"""
    out = []
    for k in exponents:
        n = 10.0 ** k
        out.append((n, float(mixing_bound_at(n, n ** (h_prime / 4.0), constants, h_prime, abs_a1))))
    return out


def _overlap(lo1, hi1, lo2, hi2):
    return np.clip(np.minimum(hi1, hi2) - np.maximum(lo1, lo2), 0.0, None)


def mixing_measure(ensemble, n):
    """(mu_n, stderr): mean over paths of the length of [0, A_1] cap [A_n, A_{n+1}]"""
    a1 = ensemble.at(1.0)
    an = ensemble.at(float(n))
    an1 = ensemble.at(float(n + 1))
    lengths = _overlap(np.minimum(a1, 0.0), np.maximum(a1, 0.0),
                       np.minimum(an, an1), np.maximum(an, an1))
    stderr = float(np.std(lengths, ddof=1) / np.sqrt(lengths.size)) if lengths.size > 1 else 0.0
    return float(np.mean(lengths)), stderr


def mixing_measure_binned(ensemble, n, grid):
    """The same measure counted on cell midpoints of a spatial grid"""
    a1 = ensemble.at(1.0)
    an = ensemble.at(float(n))
    an1 = ensemble.at(float(n + 1))
    x = grid.midpoints[None, :]
    first = (x >= np.minimum(a1, 0.0)[:, None]) & (x <= np.maximum(a1, 0.0)[:, None])
    later = (x >= np.minimum(an, an1)[:, None]) & (x <= np.maximum(an, an1)[:, None])
    return float(grid.dx * np.mean(np.sum(first & later, axis=1)))


def mixing_curve(ensemble, n_max, constants=None):
    if int(n_max) != n_max or n_max < 1:
        raise ParameterError(f"n_max must be a positive integer, got {n_max}")
    ensemble.grid.indices_of(np.arange(int(n_max) + 2, dtype=float))
    if constants is None:
        constants = fit_tail_constants(ensemble)
    else:
        validate_tail_constants(constants, ensemble)

    abs_a1 = np.abs(ensemble.at(1.0))
    ns = np.arange(1, int(n_max) + 1)
    mu = np.empty(ns.size)
    stderr = np.empty(ns.size)
    bound = np.empty(ns.size)
    bound_m = np.empty(ns.size)
    for pos, n in enumerate(ns):
        mu[pos], stderr[pos] = mixing_measure(ensemble, n)
        bound[pos], bound_m[pos] = _best_bound(n, constants, ensemble.spec.self_similarity_exponent, abs_a1)

    logger.info(f"mixing curve: mu_1 = {mu[0]:.4g}, mu_{n_max} = {mu[-1]:.4g}, "
                f"bound holds at {int(np.sum(mu <= bound))}/{ns.size} points")
    return MixingCurve(ns, mu, stderr, bound, bound_m, constants)
