"""
Symmetric beta-stable Levy motion: cumulative sums of i.i.d. SbS increments.
"""

import logging

import numpy as np

from stablesim.errors import ParameterError
from stablesim.models import SubordinatorKind
from stablesim.sampling.stable import standard_sas

logger = logging.getLogger(__name__)


def sample_levy_ensemble(spec, grid, n_paths, rng):
    """Increments over each step are S_beta(sigma * dt^(1/beta)); paths start at 0"""
    from stablesim.subordinators.ensemble import SubordinatorEnsemble

    if spec.kind is not SubordinatorKind.STABLE_LEVY:
        raise ParameterError(f"sample_levy_ensemble needs a stable Levy spec, got {spec.kind.value}")

    step_scale = spec.sigma * grid.dt ** (1.0 / spec.beta)
    paths = np.zeros((n_paths, grid.n_steps + 1))
    for i in range(n_paths):
        generator = rng.substream(i).generator()
        paths[i, 1:] = np.cumsum(standard_sas(spec.beta, generator, grid.n_steps)) * step_scale

    logger.debug(f"sampled {n_paths} stable Levy paths (beta={spec.beta}, n={grid.n_steps})")
    return SubordinatorEnsemble(spec, grid, paths, rng.seed, 'increments')
