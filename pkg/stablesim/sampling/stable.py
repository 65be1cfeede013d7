"""
Symmetric alpha-stable variates and discretised SaS random measures.

Scale convention: S_alpha(sigma) has characteristic function
exp(-sigma^alpha |theta|^alpha), so S_2(sigma) = N(0, 2 sigma^2) and
S_1(sigma) is Cauchy with scale sigma.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from stablesim.errors import GridError, MemoryBudgetError, ParameterError
from stablesim.grids import SpatialGrid

logger = logging.getLogger(__name__)

U64_MAX = 2 ** 64 - 1
CAUCHY_GUARD = 1e-6
HALF_PI = 0.5 * np.pi
SQRT2 = np.sqrt(2.0)

DEFAULT_MAX_FIELD_ENTRIES = 20_000_000
DEFAULT_BLOCK_ROWS = 64


@dataclass(frozen=True)
class StableSpec:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")

    @property
    def is_gaussian(self):
        return self.alpha == 2.0


@dataclass(frozen=True)
class SeededRng:
    """Counter-based random stream: (seed, stream_id, key) fixes every draw.

    Children made with substream() are independent of each other and of the
    parent, whatever order they are consumed in.
    """
    seed: int
    stream_id: int = 0
    key: tuple = field(default=())

    def __post_init__(self):
        for name, value in (('seed', self.seed), ('stream_id', self.stream_id)):
            if int(value) != value or not 0 <= value <= U64_MAX:
                raise ParameterError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def substream(self, *keys):
        return replace(self, key=self.key + tuple(int(k) for k in keys))

    def stream(self, stream_id):
        return SeededRng(self.seed, stream_id)

    def generator(self):
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),) + self.key)
        return np.random.Generator(np.random.PCG64(seq))


def _as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return rng.generator()


def standard_sas(alpha, generator, shape):
    """Unit-scale SaS draws by the Chambers-Mallows-Stuck transform.

    alpha = 2 and alpha = 1 use the direct Gaussian and Cauchy samplers; the
    CMS formula degenerates at both points.
    """
    if alpha == 2.0:
        return generator.normal(0.0, SQRT2, shape)
    phi = generator.uniform(-HALF_PI, HALF_PI, shape)
    if abs(alpha - 1.0) < CAUCHY_GUARD:
        return np.tan(phi)
    w = generator.standard_exponential(shape)
    return (np.sin(alpha * phi) / np.cos(phi) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * phi) / w) ** ((1.0 - alpha) / alpha))


def sample_sas(spec, scale, rng, size=None):
    """Draw from S_alpha(scale); returns a float when size is None and scale is scalar"""
    scale_arr = np.asarray(scale, dtype=float)
    if np.any(scale_arr < 0):
        raise ParameterError(f"scale must be nonnegative, got {scale}")
    shape = scale_arr.shape if size is None else size
    draws = standard_sas(spec.alpha, _as_generator(rng), shape)
    values = np.where(scale_arr == 0.0, 0.0, draws * scale_arr)
    if size is None and values.ndim == 0:
        return float(values)
    return values


def cell_scale(control_mass, spec):
    """Scale of M(cell) for a cell of the given control mass: m^(1/alpha)"""
    mass = np.asarray(control_mass, dtype=float)
    if np.any(mass < 0):
        raise ParameterError(f"control mass must be nonnegative, got {control_mass}")
    scale = mass ** (1.0 / spec.alpha)
    return float(scale) if scale.ndim == 0 else scale


def combine_scales(scales, alpha):
    """Scale of a sum of independent SaS variables"""
    scales = np.asarray(scales, dtype=float)
    return float(np.sum(scales ** alpha) ** (1.0 / alpha))


def sas_char_function(theta, scale, alpha):
    return np.exp(-(scale * np.abs(theta)) ** alpha)


def fit_scale_from_ecf(samples, alpha, theta=None):
    """Scale estimate from the empirical characteristic function at one frequency.

    The frequency defaults to 1 / median|X|, where |phi| is near exp(-1) and
    the log is well conditioned.
    """
    samples = np.asarray(samples, dtype=float)
    if theta is None:
        theta = 1.0 / np.median(np.abs(samples))
    ecf = np.abs(np.mean(np.cos(theta * samples)))
    return float((-np.log(ecf)) ** (1.0 / alpha) / theta)


@dataclass(frozen=True)
class StableNoiseField:
    """Values M(path i x cell j) of one realisation of the discretised measure"""
    values: np.ndarray
    alpha: float
    seed: int
    key: tuple
    grid: SpatialGrid
    n_paths: int

    @property
    def shape(self):
        return self.values.shape

    def header(self):
        return {
            'alpha': float(self.alpha),
            'seed': str(self.seed),
            'key': list(self.key),
            'grid': self.grid.describe(),
            'n_paths': int(self.n_paths),
        }


def sample_noise_field(grid, n_paths, spec, rng, block_rows=DEFAULT_BLOCK_ROWS,
                       max_entries=DEFAULT_MAX_FIELD_ENTRIES):
    """One independent SaS draw per (path, cell) with scale (dx / n_paths)^(1/alpha).

    Rows are filled in blocks of `block_rows`, each from its own substream, so
    the field does not depend on how callers split work across threads.
    """
    if int(n_paths) != n_paths or n_paths < 1:
        raise ParameterError(f"n_paths must be a positive integer, got {n_paths}")
    entries = n_paths * grid.n_cells
    if entries > max_entries:
        raise MemoryBudgetError(
            f"noise field of {n_paths} x {grid.n_cells} = {entries} entries exceeds budget {max_entries}")

    values = np.empty((n_paths, grid.n_cells))
    for block, start in enumerate(range(0, n_paths, block_rows)):
        stop = min(start + block_rows, n_paths)
        generator = rng.substream(block).generator()
        values[start:stop] = standard_sas(spec.alpha, generator, (stop - start, grid.n_cells))
    values *= cell_scale(grid.cell_mass(n_paths), spec)
    values.setflags(write=False)
    return StableNoiseField(values, spec.alpha, rng.seed, (rng.stream_id,) + rng.key, grid, int(n_paths))


def coarsen_field(field, grid):
    """The field on `grid`, each coarse cell the sum of the two fine cells it holds.

    grid must have the window of field.grid and twice its dx. A sum of two
    independent cells of mass m / 2 has the law of one cell of mass m, so the
    result is a draw of the coarse field paired cell by cell with the fine one.
    """
    fine = field.grid
    if not (np.isclose(grid.half_width, fine.half_width) and np.isclose(grid.dx, 2.0 * fine.dx)):
        raise GridError(f"{grid} is not the one-level coarsening of {fine}")
    values = field.values.reshape(field.n_paths, grid.n_cells, 2).sum(axis=2)
    values.setflags(write=False)
    return StableNoiseField(values, field.alpha, field.seed, field.key, grid, field.n_paths)
