"""
Fractional Brownian motion paths on an equispaced grid.

Circulant embedding (Davies-Harte) of the fractional Gaussian noise is exact
in distribution and costs O(n log n) per path; it falls back to a dense
Cholesky factor of the path covariance when the embedding has negative
eigenvalues or the grid is small.
"""

import logging

import numpy as np
from scipy import linalg

from stablesim.errors import ParameterError
from stablesim.models import SubordinatorKind

logger = logging.getLogger(__name__)

EIGEN_TOLERANCE = 1e-10
FFT_CHUNK_ENTRIES = 1 << 22    # complex entries per batched FFT


def fbm_covariance(s, t, hurst, sigma=1.0):
    """Cov(A_s, A_t) = (sigma^2 / 2)(s^2H + t^2H - |t - s|^2H)"""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    two_h = 2.0 * hurst
    return 0.5 * sigma ** 2 * (np.abs(s) ** two_h + np.abs(t) ** two_h - np.abs(t - s) ** two_h)


def fgn_autocovariance(hurst, n):
    """Autocovariance of unit-step fractional Gaussian noise at lags 0..n"""
    k = np.arange(n + 1, dtype=float)
    two_h = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** two_h - 2.0 * k ** two_h + np.abs(k - 1) ** two_h)


def circulant_eigenvalues(hurst, n):
    gamma = fgn_autocovariance(hurst, n)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    return np.fft.fft(row).real


def synthesis_plan(hurst, n, dense_threshold=64):
    """('circulant', eigenvalues) when the embedding of n steps is usable, else ('cholesky', None)"""
    if n <= dense_threshold:
        return 'cholesky', None
    eigenvalues = circulant_eigenvalues(hurst, n)
    if eigenvalues.min() < -EIGEN_TOLERANCE * eigenvalues.max():
        logger.warning(f"circulant embedding not positive for H'={hurst}, n={n}; "
                       f"falling back to dense Cholesky")
        return 'cholesky', None
    return 'circulant', eigenvalues


def _circulant_increments(eigenvalues, n, rng, n_paths):
    m = eigenvalues.size
    weights = np.sqrt(np.clip(eigenvalues, 0.0, None) / m)
    increments = np.empty((n_paths, n))
    chunk = max(1, FFT_CHUNK_ENTRIES // m)
    for start in range(0, n_paths, chunk):
        stop = min(start + chunk, n_paths)
        noise = np.empty((stop - start, m), dtype=complex)
        for row, i in enumerate(range(start, stop)):
            generator = rng.substream(i).generator()
            noise[row].real = generator.standard_normal(m)
            noise[row].imag = generator.standard_normal(m)
        increments[start:stop] = np.fft.fft(weights * noise, axis=1)[:, :n].real
    return increments



def _cholesky_paths(grid, hurst, rng, n_paths):
    t = grid.points[1:]
    cov = fbm_covariance(t[:, None], t[None, :], hurst)
    factor = linalg.cholesky(cov, lower=True)
    z = np.empty((n_paths, t.size))
    for i in range(n_paths):
        z[i] = rng.substream(i).generator().standard_normal(t.size)
    return z @ factor.T


def sample_fbm_ensemble(spec, grid, n_paths, rng, dense_threshold=64):
    """Ensemble of FBM-H' paths with Var(A_1) = sigma^2, every path starting at 0"""
    from stablesim.subordinators.ensemble import SubordinatorEnsemble

    if spec.kind is not SubordinatorKind.FBM:
        raise ParameterError(f"sample_fbm_ensemble needs an FBM spec, got {spec.kind.value}")

    n = grid.n_steps
    method, eigenvalues = synthesis_plan(spec.hurst, n, dense_threshold)

    paths = np.zeros((n_paths, n + 1))
    if method == 'circulant':
        increments = _circulant_increments(eigenvalues, n, rng, n_paths)
        paths[:, 1:] = np.cumsum(increments, axis=1) * grid.dt ** spec.hurst
    else:
        paths[:, 1:] = _cholesky_paths(grid, spec.hurst, rng, n_paths)
    paths *= spec.sigma

    logger.debug(f"sampled {n_paths} FBM paths (H'={spec.hurst}, n={n}) by {method}")
    return SubordinatorEnsemble(spec, grid, paths, rng.seed, method)
