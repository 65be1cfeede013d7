"""
Characteristic functional of the integral process, computed without noise.

For a linear form sum_j theta_j (Y(t_j) - Y(s_j)) the characteristic function
is exp(-I) with

    I = integral over x of E' |sum_j theta_j g_j(x)|^alpha dx,

g_j the increment kernel f_{t_j} - f_{s_j}. Step kernels make the integrand
piecewise constant between the points {0, A_{t_j}, A_{s_j}}, so the
x-integral is computed exactly per path and the only error left is Monte
Carlo error over paths.
"""

import logging
from dataclasses import dataclass

import numpy as np

from stablesim.errors import InsufficientReplicatesError, ParameterError
from stablesim.models import KernelVariant
from stablesim.engine.kernels import step_geometry

logger = logging.getLogger(__name__)

TRUNCATION_TOLERANCE = 1e-3
MIN_REPLICATES = 100


@dataclass(frozen=True)
class LinearForm:
    thetas: tuple
    t: tuple
    s: tuple

    def __post_init__(self):
        k = len(self.thetas)
        if k < 1 or len(self.t) != k or len(self.s) != k:
            raise ParameterError("a linear form needs k >= 1 matching thetas, t and s")
        if min(self.t) < 0 or min(self.s) < 0:
            raise ParameterError("form times must be nonnegative")

    @classmethod
    def single(cls, theta, t):
        return cls((float(theta),), (float(t),), (0.0,))

    @property
    def times(self):
        return sorted(set(self.t) | set(self.s))

    def scaled(self, c):
        return LinearForm(self.thetas, tuple(c * x for x in self.t), tuple(c * x for x in self.s))

    def shifted(self, h):
        return LinearForm(self.thetas, tuple(x + h for x in self.t), tuple(x + h for x in self.s))

    def with_thetas(self, factor):
        return LinearForm(tuple(factor * th for th in self.thetas), self.t, self.s)

    def on_grid(self, grid):
        """Same form with every time moved to the nearest point of grid"""
        return LinearForm(self.thetas, tuple(grid.snap(x) for x in self.t),
                          tuple(grid.snap(x) for x in self.s))

    def as_dict(self):
        return {'thetas': list(self.thetas), 't': list(self.t), 's': list(self.s)}


def default_form_panel():
    """Ten forms with k <= 3 and times in [0, 3]"""
    return [
        LinearForm((1.0,), (1.0,), (0.0,)),
        LinearForm((0.5,), (2.0,), (0.0,)),
        LinearForm((2.0,), (0.5,), (0.0,)),
        LinearForm((1.0, -1.0), (1.0, 2.0), (0.0, 0.0)),
        LinearForm((1.0, 1.0), (1.0, 2.0), (0.0, 0.0)),
        LinearForm((1.0,), (2.0,), (1.0,)),
        LinearForm((0.5, 0.5, 0.5), (0.5, 1.0, 1.5), (0.0, 0.0, 0.0)),
        LinearForm((1.0, -0.5), (2.0, 3.0), (1.0, 1.0)),
        LinearForm((0.3, -0.7, 1.0), (1.0, 2.0, 3.0), (0.0, 1.0, 2.0)),
        LinearForm((1.5,), (0.25,), (0.0,)),
    ]


# span and finest spacing of the panel's times
PANEL_HORIZON = 3.0
PANEL_RESOLUTION = 0.25


def panel_on_grid(grid):
    """The default panel with its times moved onto grid.

    Distinct panel times stay distinct as long as grid.dt <= PANEL_RESOLUTION.
    """
    return [form.on_grid(grid) for form in default_form_panel()]


def form_times(forms):
    return sorted({t for form in forms for t in form.times})


@dataclass(frozen=True)
class CharFunctionalEstimate:
    exponent: float
    stderr: float

    @property
    def value(self):
        return float(np.exp(-self.exponent))

    def as_dict(self):
        return {'exponent': float(self.exponent), 'stderr': float(self.stderr), 'value': self.value}


@dataclass(frozen=True)
class EmpiricalCharEstimate:
    value: complex
    stderr_real: float
    stderr_imag: float
    n: int

    @property
    def stderr(self):
        return float(np.hypot(self.stderr_real, self.stderr_imag))

    def as_dict(self):
        return {
            'real': float(self.value.real),
            'imag': float(self.value.imag),
            'stderr_real': float(self.stderr_real),
            'stderr_imag': float(self.stderr_imag),
            'n': int(self.n),
        }


def _mean_and_stderr(per_path):
    n = per_path.size
    mean = float(np.mean(per_path))
    stderr = float(np.std(per_path, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


def _warn_truncation(form, ensemble, grid):
    for t in form.times:
        lost = ensemble.truncated_mass(t, grid.half_width)
        scale = max(ensemble.mean_abs(t), 1e-300)
        if lost / scale > TRUNCATION_TOLERANCE:
            logger.warning(f"oracle: {lost / scale:.2%} of E'|A_{t}| lies outside the spatial window")


def _step_value(kernel, ensemble, t, x, n_rows):
    """Kernel value f_t at points x, shape (n_rows, m)"""
    lo, hi, sign = step_geometry(kernel, ensemble, t, n_rows=n_rows)
    inside = (x >= lo[:, None]) & (x <= hi[:, None])
    return sign[:, None] * inside


def _step_exponents(form, kernel, ensemble, grid, alpha):
    n_rows = 1 if kernel.variant is KernelVariant.LEVY_DETERMINISTIC else ensemble.n_paths
    points = [np.zeros(n_rows)]
    for t in form.times:
        lo, hi, _ = step_geometry(kernel, ensemble, t, n_rows=n_rows)
        points.extend([lo, hi])
    breaks = np.sort(grid.clip(np.column_stack(points)), axis=1)
    mids = 0.5 * (breaks[:, 1:] + breaks[:, :-1])
    lengths = np.diff(breaks, axis=1)

    combo = np.zeros_like(mids)
    for theta, t, s in zip(form.thetas, form.t, form.s):
        combo += theta * (_step_value(kernel, ensemble, t, mids, n_rows)
                          - _step_value(kernel, ensemble, s, mids, n_rows))
    return np.sum(lengths * np.abs(combo) ** alpha, axis=1)


def _local_time_exponents(form, kernel, alpha):
    field = kernel.local_time
    combo = np.zeros((field.ensemble.n_paths, field.x_grid.n_cells))
    for theta, t, s in zip(form.thetas, form.t, form.s):
        combo += theta * (field.at(t) - field.at(s))
    return field.x_grid.dx * np.sum(np.abs(combo) ** alpha, axis=1)


def exponent_integral(form, kernel, ensemble, grid, spec):
    """Exponent I of the characteristic functional, with its path-level standard error"""
    if not kernel.variant.is_step:
        per_path = _local_time_exponents(form, kernel, spec.alpha)
    else:
        if ensemble is not None and kernel.variant is not KernelVariant.LEVY_DETERMINISTIC:
            _warn_truncation(form, ensemble, grid)
        per_path = _step_exponents(form, kernel, ensemble, grid, spec.alpha)
    exponent, stderr = _mean_and_stderr(per_path)
    return CharFunctionalEstimate(exponent, stderr)


def discretized_exponent(form, kernel, ensemble, grid, spec):
    """Exponent of the discretised simulation law (cell coverage fractions).

    Differs from exponent_integral only in cells cut by a breakpoint, so the
    gap between the two measures the spatial discretisation error.
    """
    from stablesim.engine.kernels import kernel_matrix

    n_rows = ensemble.n_paths if ensemble is not None else 1
    combo = np.zeros((n_rows, grid.n_cells))
    for theta, t, s in zip(form.thetas, form.t, form.s):
        combo += theta * (kernel_matrix(kernel, ensemble, grid, t)
                          - kernel_matrix(kernel, ensemble, grid, s))
    per_path = grid.dx * np.sum(np.abs(combo) ** spec.alpha, axis=1)
    exponent, stderr = _mean_and_stderr(per_path)
    return CharFunctionalEstimate(exponent, stderr)


def empirical_char(samples, form, min_replicates=MIN_REPLICATES):
    """Sample mean of exp(i sum_j theta_j (Y(t_j) - Y(s_j))) over replicates"""
    if len(samples) < min_replicates:
        raise InsufficientReplicatesError(
            f"{len(samples)} replicates given, at least {min_replicates} needed")
    return empirical_char_matrix(samples[0].times, np.stack([s.values for s in samples]), form,
                                 min_replicates=min_replicates)


def _phase(times, values, form):
    """sum_j theta_j (Y(t_j) - Y(s_j)) per replicate"""
    times = np.asarray(times, dtype=float)

    def column(t):
        hits = np.flatnonzero(np.isclose(times, t, rtol=0.0, atol=1e-9))
        if hits.size == 0:
            raise ParameterError(f"time {t} was not simulated")
        return values[:, hits[0]]

    phase = np.zeros(values.shape[0])
    for theta, t, s in zip(form.thetas, form.t, form.s):
        if theta != 0.0:
            phase += theta * (column(t) - column(s))
    return phase


def empirical_char_matrix(times, values, form, min_replicates=MIN_REPLICATES):
    """empirical_char over a (replicates, times) array"""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < min_replicates:
        raise InsufficientReplicatesError(
            f"{values.shape[0]} replicates given, at least {min_replicates} needed")
    z = np.exp(1j * _phase(times, values, form))
    n = z.size
    return EmpiricalCharEstimate(
        value=complex(np.mean(z)),
        stderr_real=float(np.std(z.real, ddof=1) / np.sqrt(n)),
        stderr_imag=float(np.std(z.imag, ddof=1) / np.sqrt(n)),
        n=n,
    )


def paired_char_change(times, first, second, form):
    """(|phi_first - phi_second|, stderr of that difference) for replicates paired row by row"""
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    if first.shape != second.shape:
        raise ParameterError(f"paired samples differ in shape: {first.shape} vs {second.shape}")
    d = np.exp(1j * _phase(times, first, form)) - np.exp(1j * _phase(times, second, form))
    n = d.size
    if n < 2:
        raise InsufficientReplicatesError("a paired difference needs at least two replicates")
    stderr = float(np.hypot(np.std(d.real, ddof=1), np.std(d.imag, ddof=1)) / np.sqrt(n))
    return float(abs(np.mean(d))), stderr


def char_zscore(empirical, oracle):
    """|empirical - exp(-I)| over the combined standard error"""
    diff = abs(empirical.value - oracle.value)
    combined = np.sqrt(empirical.stderr_real ** 2 + empirical.stderr_imag ** 2
                       + (oracle.value * oracle.stderr) ** 2)
    if combined == 0.0:
        return 0.0 if diff == 0.0 else float('inf')
    return float(diff / combined)


def char_difference_zscore(first, second):
    diff = abs(first.value - second.value)
    combined = np.sqrt(first.stderr_real ** 2 + first.stderr_imag ** 2
                       + second.stderr_real ** 2 + second.stderr_imag ** 2)
    if combined == 0.0:
        return 0.0 if diff == 0.0 else float('inf')
    return float(diff / combined)
