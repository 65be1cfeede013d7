"""
Extreme-value statistic n^(-1/alpha) max_{j<=n} Z(j).

For noise generated by a conservative flow the statistic tends to 0 in
probability; for i.i.d. SaS noise with alpha < 2 it has a Frechet limit.
"""

from dataclasses import dataclass

import numpy as np

from stablesim.errors import ParameterError
from stablesim.sampling.stable import standard_sas


@dataclass(frozen=True)
class ExtremeValueCurve:
    n: tuple
    medians: np.ndarray
    stderr: np.ndarray

    def decay_ratio(self):
        """Median at the largest n over the median at the smallest n"""
        if self.medians[0] == 0:
            return float('inf')
        return float(self.medians[-1] / self.medians[0])

    def as_dict(self):
        return {
            'n': [int(n) for n in self.n],
            'medians': [float(m) for m in self.medians],
            'stderr': [float(s) for s in self.stderr],
            'decay_ratio': self.decay_ratio(),
        }


def median_stderr(sample):
    """Half the width of the order-statistic band n/2 +- sqrt(n)/2"""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n < 2:
        return 0.0
    lo = max(int(np.floor(n / 2.0 - np.sqrt(n) / 2.0)), 0)
    hi = min(int(np.ceil(n / 2.0 + np.sqrt(n) / 2.0)), n - 1)
    return float(0.5 * (x[hi] - x[lo]))


def extreme_value_stat(noise, ns, alpha):
    """Median over replicates of n^(-1/alpha) max_{j<=n} Z(j) for each n in ns.

    noise has shape (n_replicates, n_max) holding Z(1..n_max).
    """
    noise = np.asarray(noise, dtype=float)
    if noise.ndim != 2:
        raise ParameterError("noise must be a (replicates, n_max) array")
    ns = tuple(int(n) for n in ns)
    if not ns or min(ns) < 1 or max(ns) > noise.shape[1]:
        raise ParameterError(f"n values must lie in 1..{noise.shape[1]}, got {ns}")
    running = np.maximum.accumulate(noise, axis=1)
    medians = np.empty(len(ns))
    stderr = np.empty(len(ns))
    for pos, n in enumerate(ns):
        stat = running[:, n - 1] * float(n) ** (-1.0 / alpha)
        medians[pos] = np.median(stat)
        stderr[pos] = median_stderr(stat)
    return ExtremeValueCurve(ns, medians, stderr)


def iid_noise_control(alpha, n_max, n_replicates, rng, scale=1.0):
    """I.i.d. SaS noise of the given scale, shape (n_replicates, n_max)"""
    if scale <= 0:
        raise ParameterError(f"scale must be positive, got {scale}")
    return scale * standard_sas(alpha, rng.generator(), (int(n_replicates), int(n_max)))
