"""
Experiment registry.

Every experiment reads its own substream of the run seed, returns an
ExperimentResult with plain-number metrics, and gets its verdict from a
pure function of those metrics and the tolerances. The report command
re-derives verdicts through the same functions.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from stablesim.diagnostics import (
    bound_vanishing_sequence, check_probes_on_grid, classify_flow, conservativity_sum,
    default_selfsim_times, estimate_selfsim_exponent, extreme_value_stat,
    gaussian_covariance_check, iid_noise_control, ks_critical_value, levy_increment_check,
    mixing_curve, mixing_measure, mixing_measure_binned, pinned_ensemble,
    stationarity_distance, stationarity_times,
)
from stablesim.engine import (
    Kernel, feasibility_check, sample_matrix, simulate_noise, simulate_process, truncation_ledger,
)
from stablesim.errors import ParameterError
from stablesim.grids import SpatialGrid, TimeGrid, lattice_grid
from stablesim.models import Experiment, KernelVariant, ProcessKind
from stablesim.oracle import (
    LinearForm, char_difference_zscore, char_zscore, discretized_exponent,
    empirical_char_matrix, exponent_integral, form_times, paired_char_change, panel_on_grid,
)
from stablesim.runner.config_parser import DEFAULT_TOLERANCES, grid_times
from stablesim.runner.guards import experiment_guard
from stablesim.sampling import SeededRng, coarsen_field, sample_noise_field
from stablesim.subordinators import compute_local_time, generate_ensemble, recurrence_check

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS = {
    'MAX_FIELD_ENTRIES': 20_000_000,
    'MAX_LOCAL_TIME_ENTRIES': 50_000_000,
    'NOISE_BLOCK_ROWS': 64,
    'FBM_DENSE_THRESHOLD': 64,
    'PILOT_QUANTILE': 0.999,
    'MIN_SELFSIM_REPLICATES': 1000,
    'BINNED_CHECK_PATHS': 10_000,
}


@dataclass
class ExperimentResult:
    experiment: Experiment
    applicable: bool
    passed: bool
    metrics: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    def as_dict(self):
        return {'applicable': self.applicable, 'passed': self.passed, 'metrics': self.metrics}


def not_applicable(experiment, reason):
    return ExperimentResult(experiment, False, True, {'reason': reason})


def fit_half_width(ensemble, quantile):
    """Window half-width covering the given quantile of max_t |A_t|, rounded up to 0.1"""
    q = float(np.quantile(ensemble.max_abs(), quantile))
    return max(np.ceil(q * 10.0) / 10.0, 0.1)



class RunContext:
    """Shared state of one run: streams, ensembles, settings and the truncation ledger"""

    def __init__(self, config, threads=1, cache=None, settings=None):
        self.config = config
        self.threads = max(1, int(threads))
        self.cache = cache
        self.settings = {**DEFAULT_SETTINGS, **(settings or {})}
        self.tolerances = {name: config.tolerance(name) for name in DEFAULT_TOLERANCES}
        self.root = SeededRng(config.seed)
        self.results = {}
        self.artifacts = {}
        self.truncation = {}
        self._main = None

    @property
    def spec(self):
        return self.config.stable_spec

    @property
    def has_subordinator(self):
        return self.config.subordinator is not None

    def stream(self, experiment, *keys):
        return self.root.stream(1 + experiment.order).substream(*keys)

    def ensemble(self, grid, n_paths, rng):
        dense = self.settings['FBM_DENSE_THRESHOLD']
        if self.cache is not None:
            return self.cache.ensemble(self.config.subordinator, grid, n_paths, rng, dense_threshold=dense)
        return generate_ensemble(self.config.subordinator, grid, n_paths, rng, dense_threshold=dense)

    def main_ensemble(self):
        """Ensemble on the config grid, shared by the oracle and the simulator"""
        if not self.has_subordinator:
            return None
        if self._main is None:
            self._main = self.ensemble(self.config.time_grid, self.config.n_paths, self.root.stream(0))
            logger.info(f"main ensemble shared by oracle and simulator: {self._main.n_paths} paths")
        return self._main

    def spatial_grid(self, ensemble, horizon=None, fitted=False):
        """Window for an ensemble: [-t, t] on the Levy route, else the config or pilot-fitted X.

        fitted=True ignores a configured half_width, for ensembles on their own horizons.
        """
        config = self.config
        if config.process is ProcessKind.LEVY:
            half_width = max(float(horizon or config.t_max), config.half_width or 0.0)
        elif config.half_width is not None and not fitted:
            half_width = config.half_width
        else:
            half_width = fit_half_width(ensemble, self.settings['PILOT_QUANTILE'])
        return SpatialGrid.from_half_width(half_width, config.cells_per_half)


    def kernel(self, ensemble, x_grid, times, variant=None):
        """Kernel of `variant` (default: the config process's kernel) for this ensemble and window"""
        variant = variant or self.config.process.kernel
        if variant is KernelVariant.LEVY_DETERMINISTIC:
            return Kernel.levy()
        if variant is KernelVariant.LOCAL_TIME:
            field = compute_local_time(ensemble, x_grid, times,
                                       max_entries=self.settings['MAX_LOCAL_TIME_ENTRIES'])
            return Kernel.from_local_time(field)
        if variant is KernelVariant.SIGNED_INDICATOR:
            return Kernel.signed_indicator()
        return Kernel.indicator()

    def noise_field(self, x_grid, n_paths, rng):
        return sample_noise_field(x_grid, n_paths, self.spec, rng,
                                  block_rows=self.settings['NOISE_BLOCK_ROWS'],
                                  max_entries=self.settings['MAX_FIELD_ENTRIES'])

    def simulate(self, kernel, ensemble, x_grid, times, rng, n_replicates=None, label=None,
                 field_source=None):
        samples = simulate_process(
            kernel, ensemble, x_grid, times, self.spec, rng,
            n_replicates or self.config.n_replicates, threads=self.threads,
            field_source=field_source,
            block_rows=self.settings['NOISE_BLOCK_ROWS'],
            max_entries=self.settings['MAX_FIELD_ENTRIES'])
        if label:
            self.record_truncation(label, ensemble, x_grid, times)
        return sample_matrix(samples)

    def record_truncation(self, label, ensemble, x_grid, times):
        ledger = truncation_ledger(ensemble, x_grid, times)
        self.truncation[label] = {f'{t:g}': float(v) for t, v in ledger.items()}


def _panel(context):
    """(forms, times): the form panel moved onto the config grid and the times it reads"""
    forms = panel_on_grid(context.config.time_grid)
    return forms, form_times(forms)


def _selfsim_times(context):
    times = context.config.param('selfsim_times') or default_selfsim_times(context.config.time_grid)
    return grid_times(context.config, times)


def _expected_h(context):
    return feasibility_check(context.spec, context.config.subordinator, context.config.process).H


# Verdicts: pure functions of (metrics, tolerances)

def _verdict_feasibility(m, tol):
    return bool(m['range_ok'])


def _verdict_selfsim(m, tol):
    return abs(m['H_hat'] - m['expected_H']) <= tol['selfsim_h'] and m['r_squared'] >= tol['selfsim_r2']


def _verdict_stationarity(m, tol):
    ok = m['distance'] < m['critical_value']
    if m.get('broken_distance') is not None:
        ok = ok and m['broken_distance'] > m['critical_value']
    return ok


def _verdict_signkernel(m, tol):
    return m['max_z'] <= tol['sign_z']


def _verdict_charmatch(m, tol):
    return m['max_z'] <= tol['char_z']


def _verdict_refinement(m, tol):
    return m['z'] <= tol['refinement_z']


def _verdict_levyreduction(m, tol):
    return m['max_z'] <= tol['levy_z']


def _verdict_gaussiancov(m, tol):
    return (m['max_relative_error'] <= tol['gaussiancov_rel']
            and abs(m['H_hat'] - m['expected_H']) <= tol['gaussiancov_h'])


def _verdict_mixing(m, tol):
    vanishing = m['bound_vanishing']
    return (m['decay_ratio'] <= tol['mixing_decay']
            and m['bound_violations'] == 0
            and vanishing[-1] < vanishing[0])


def _verdict_conservativity(m, tol):
    growth_ok = all(abs(g - m['expected_growth']) <= tol['conservativity_growth'] for g in m['growth'])
    return m['monotone'] and min(m['final_sums']) > tol['conservativity_min_sum'] and growth_ok


def _verdict_extreme(m, tol):
    decays = m['decay_ratio'] < tol['extreme_ratio']
    if m['control_informative']:
        return decays and m['control_decay_ratio'] >= tol['extreme_ratio']
    return decays


def _verdict_classification(m, tol):
    return bool(m['conservative'] and m['null'])


VERDICTS = {
    Experiment.FEASIBILITY: _verdict_feasibility,
    Experiment.SELFSIM: _verdict_selfsim,
    Experiment.STATIONARITY: _verdict_stationarity,
    Experiment.SIGNKERNEL: _verdict_signkernel,
    Experiment.CHARMATCH: _verdict_charmatch,
    Experiment.REFINEMENT: _verdict_refinement,
    Experiment.LEVYREDUCTION: _verdict_levyreduction,
    Experiment.GAUSSIANCOV: _verdict_gaussiancov,
    Experiment.MIXING: _verdict_mixing,
    Experiment.CONSERVATIVITY: _verdict_conservativity,
    Experiment.EXTREME: _verdict_extreme,
    Experiment.CLASSIFICATION: _verdict_classification,
}


def _result(context, experiment, metrics, tables=None):
    passed = bool(VERDICTS[experiment](metrics, context.tolerances))
    return ExperimentResult(experiment, True, passed, metrics, tables or {})


# Experiments

@experiment_guard(Experiment.FEASIBILITY)
def run_feasibility(context):
    report = feasibility_check(context.spec, context.config.subordinator, context.config.process)
    metrics = report.as_dict()
    metrics['stderr'] = 0.0
    return _result(context, Experiment.FEASIBILITY, metrics)


@experiment_guard(Experiment.SELFSIM)
def run_selfsim(context):
    config = context.config
    times = _selfsim_times(context)
    ensemble = context.main_ensemble()
    x_grid = context.spatial_grid(ensemble)
    kernel = context.kernel(ensemble, x_grid, times)
    times, values = context.simulate(kernel, ensemble, x_grid, times,
                                     context.stream(Experiment.SELFSIM), label='selfsim')
    fit = estimate_selfsim_exponent(values, times, p=config.param('selfsim_quantile'),
                                    min_replicates=context.settings['MIN_SELFSIM_REPLICATES'])
    expected = _expected_h(context)
    metrics = {**fit.as_dict(), 'expected_H': expected}
    label = f"{config.process.value}_alpha{config.alpha:g}_H{config.h_prime:g}"
    rows = [{'config': label, 'H_hat': fit.H_hat, 'stderr': fit.stderr,
             'r_squared': fit.r_squared, 'expected_H': expected}]
    return _result(context, Experiment.SELFSIM, metrics, {'exponent_fits': rows})


@experiment_guard(Experiment.STATIONARITY)
def run_stationarity(context):
    config = context.config
    span = config.param('stationarity_span')
    shifts = config.param('stationarity_shifts')
    needed = stationarity_times(span, shifts)
    horizon = max(needed)
    rng = context.stream(Experiment.STATIONARITY)

    if horizon <= config.t_max:
        grid = config.time_grid
        ensemble = context.main_ensemble()
    else:
        grid = TimeGrid(horizon, int(round(horizon / config.time_grid.dt)))
        ensemble = context.ensemble(grid, config.n_paths, rng.substream(0)) if context.has_subordinator else None
    if ensemble is not None:
        grid.indices_of(needed)
    x_grid = context.spatial_grid(ensemble, horizon=horizon, fitted=horizon > context.config.t_max)

    kernel = context.kernel(ensemble, x_grid, needed)
    times, values = context.simulate(kernel, ensemble, x_grid, needed, rng.substream(1), label='stationarity')
    result = stationarity_distance(values, times, span, shifts)
    critical = ks_critical_value(result.n, coefficient=context.tolerances['ks_coefficient'])

    broken = None
    if ensemble is not None:
        pinned = pinned_ensemble(ensemble, shifts)
        _, broken_values = context.simulate(Kernel.indicator(), pinned, x_grid, needed, rng.substream(2))
        broken = stationarity_distance(broken_values, times, span, shifts).distance

    metrics = {
        'distance': result.distance,
        'per_shift': {f'{h:g}': d for h, d in result.per_shift.items()},
        'critical_value': critical,
        'broken_distance': broken,
        'n': result.n,
        'stderr': float(np.sqrt(2.0 / result.n)),
    }
    return _result(context, Experiment.STATIONARITY, metrics)


def _form_record(form, **entries):
    return {'form': form.as_dict(), **entries}


@experiment_guard(Experiment.SIGNKERNEL)
def run_signkernel(context):
    if not context.has_subordinator:
        return not_applicable(Experiment.SIGNKERNEL, 'the Levy kernel does not depend on a subordinator')
    panel, times = _panel(context)
    ensemble = context.main_ensemble()
    x_grid = context.spatial_grid(ensemble)
    rng = context.stream(Experiment.SIGNKERNEL)
    indicator = context.kernel(ensemble, x_grid, times, KernelVariant.INDICATOR)
    signed_kernel = context.kernel(ensemble, x_grid, times, KernelVariant.SIGNED_INDICATOR)
    _, plain = context.simulate(indicator, ensemble, x_grid, times, rng.substream(0), label='signkernel')
    _, signed = context.simulate(signed_kernel, ensemble, x_grid, times, rng.substream(1))

    forms = []
    for form in panel:
        first = empirical_char_matrix(times, plain, form)
        second = empirical_char_matrix(times, signed, form)
        forms.append(_form_record(form, indicator=first.as_dict(), signed=second.as_dict(),
                                  z=char_difference_zscore(first, second)))
    metrics = {'forms': forms, 'max_z': max(f['z'] for f in forms)}
    return _result(context, Experiment.SIGNKERNEL, metrics)


@experiment_guard(Experiment.CHARMATCH)
def run_charmatch(context):
    panel, times = _panel(context)
    ensemble = context.main_ensemble()
    x_grid = context.spatial_grid(ensemble, horizon=context.config.t_max)
    kernel = context.kernel(ensemble, x_grid, times)
    _, values = context.simulate(kernel, ensemble, x_grid, times,
                                 context.stream(Experiment.CHARMATCH), label='charmatch')
    forms = []
    for form in panel:
        oracle = exponent_integral(form, kernel, ensemble, x_grid, context.spec)
        empirical = empirical_char_matrix(times, values, form)
        forms.append(_form_record(form, oracle=oracle.as_dict(), empirical=empirical.as_dict(),
                                  z=char_zscore(empirical, oracle)))
    metrics = {'forms': forms, 'max_z': max(f['z'] for f in forms)}
    return _result(context, Experiment.CHARMATCH, metrics)


@experiment_guard(Experiment.REFINEMENT)
def run_refinement(context):
    """Halve dx and compare phi_{Y(1)}(1) on paired fields; the panel exponents are reported too"""
    if not context.has_subordinator:
        return not_applicable(Experiment.REFINEMENT, 'no subordinator ensemble to refine')
    config = context.config
    panel, times = _panel(context)
    t1 = config.time_grid.snap(1.0)
    ensemble = context.main_ensemble()
    coarse_grid = context.spatial_grid(ensemble)
    fine_grid = coarse_grid.refined()
    coarse_kernel = context.kernel(ensemble, coarse_grid, times)
    fine_kernel = context.kernel(ensemble, fine_grid, times)
    rng = context.stream(Experiment.REFINEMENT)

    # Replicate r of the coarse run sums adjacent cell pairs of fine replicate r
    fine_rng = rng.substream(0)
    n_paths = ensemble.n_paths

    def coarse_field(r):
        return coarsen_field(context.noise_field(fine_grid, n_paths, fine_rng.substream(r)), coarse_grid)

    ecf_times = [0.0, t1]
    _, fine_values = context.simulate(fine_kernel, ensemble, fine_grid, ecf_times, fine_rng,
                                      label='refinement')
    _, coarse_values = context.simulate(coarse_kernel, ensemble, coarse_grid, ecf_times, fine_rng,
                                        field_source=coarse_field)
    form = LinearForm.single(1.0, t1)
    coarse = empirical_char_matrix(ecf_times, coarse_values, form)
    fine = empirical_char_matrix(ecf_times, fine_values, form)
    change, paired_stderr = paired_char_change(ecf_times, coarse_values, fine_values, form)
    z = change / fine.stderr if fine.stderr > 0 else (0.0 if change == 0 else float('inf'))

    # Panel exponents against an independent ensemble of twice the paths
    independent = context.ensemble(config.time_grid, 2 * n_paths, rng.substream(1))
    independent_kernel = context.kernel(independent, fine_grid, times)
    forms = []
    for panel_form in panel:
        before = discretized_exponent(panel_form, coarse_kernel, ensemble, coarse_grid, context.spec)
        after = discretized_exponent(panel_form, independent_kernel, independent, fine_grid, context.spec)
        combined = float(np.hypot(before.stderr, after.stderr))
        gap = abs(before.exponent - after.exponent)
        form_z = gap / combined if combined > 0 else (0.0 if gap == 0 else float('inf'))
        forms.append(_form_record(panel_form, coarse=before.as_dict(), fine=after.as_dict(), z=form_z))

    metrics = {
        't': t1,
        'coarse': coarse.as_dict(),
        'fine': fine.as_dict(),
        'change': change,
        'stderr': fine.stderr,
        'paired_stderr': paired_stderr,
        'z': z,
        'coarse_dx': coarse_grid.dx,
        'fine_dx': fine_grid.dx,
        'forms': forms,
        'panel_max_z': max(f['z'] for f in forms),
    }
    return _result(context, Experiment.REFINEMENT, metrics)


@experiment_guard(Experiment.LEVYREDUCTION)
def run_levyreduction(context):
    config = context.config
    if config.process is not ProcessKind.LEVY:
        return not_applicable(Experiment.LEVYREDUCTION, "only the H' = 1 route reduces to Levy motion")
    times = grid_times(config, np.arange(0.0, np.floor(config.t_max) + 1.0))
    x_grid = context.spatial_grid(None)
    _, values = context.simulate(Kernel.levy(), None, x_grid, times,
                                 context.stream(Experiment.LEVYREDUCTION), label='levyreduction')
    checks = levy_increment_check(values, times, config.alpha, thetas=config.param('levy_thetas'))
    metrics = {'checks': [c.as_dict() for c in checks], 'max_z': max(c.zscore for c in checks)}
    return _result(context, Experiment.LEVYREDUCTION, metrics)


@experiment_guard(Experiment.GAUSSIANCOV)
def run_gaussiancov(context):
    config = context.config
    if config.alpha != 2.0 or config.process is not ProcessKind.IFSM:
        return not_applicable(Experiment.GAUSSIANCOV, 'the Gaussian reduction needs alpha = 2 and the indicator kernel')
    pairs = config.param('gaussiancov_pairs')
    if 'gaussiancov_pairs' not in config.params:
        pairs = tuple(p for p in pairs if max(p) <= config.t_max)
    if not pairs:
        raise ParameterError('no covariance pair lies within t_max')
    fit_times = _selfsim_times(context)
    times = grid_times(config, sorted({t for p in pairs for t in p} | set(fit_times)))
    ensemble = context.main_ensemble()
    x_grid = context.spatial_grid(ensemble)
    times, values = context.simulate(Kernel.indicator(), ensemble, x_grid, times,
                                     context.stream(Experiment.GAUSSIANCOV), label='gaussiancov')
    comparisons = gaussian_covariance_check(values, times, ensemble, x_grid, pairs)

    columns = [int(np.flatnonzero(np.isclose(times, t, rtol=0.0, atol=1e-9))[0]) for t in fit_times]
    fit = estimate_selfsim_exponent(values[:, columns], fit_times,
                                    min_replicates=context.settings['MIN_SELFSIM_REPLICATES'])
    metrics = {
        'pairs': [c.as_dict() for c in comparisons],
        'max_relative_error': max(c.relative_error for c in comparisons),
        'H_hat': fit.H_hat,
        'stderr': fit.stderr,
        'expected_H': config.h_prime / 2.0,
    }
    return _result(context, Experiment.GAUSSIANCOV, metrics)


@experiment_guard(Experiment.MIXING)
def run_mixing(context):
    if not context.has_subordinator:
        return not_applicable(Experiment.MIXING, 'no subordinator')
    config = context.config
    n_max = config.param('mixing_n_max')
    ensemble = context.ensemble(lattice_grid(n_max + 1), config.param('mixing_paths'),
                                context.stream(Experiment.MIXING))
    curve = mixing_curve(ensemble, n_max)
    abs_a1 = np.abs(ensemble.at(1.0))
    vanishing = bound_vanishing_sequence(curve.constants, config.h_prime, abs_a1)

    # Pathwise and grid-binned measures on a subset of paths
    subset = ensemble.head(min(ensemble.n_paths, context.settings['BINNED_CHECK_PATHS']))
    x_grid = context.spatial_grid(subset, fitted=True)
    binned = []
    for n in sorted({1, max(1, n_max // 2), n_max}):
        exact, _ = mixing_measure(subset, n)
        on_grid = mixing_measure_binned(subset, n, x_grid)
        binned.append({'n': n, 'pathwise': exact, 'binned': on_grid,
                       'within_tolerance': abs(exact - on_grid) <= 4.0 * x_grid.dx + 1e-12})

    violations = int(np.sum(curve.mu > curve.bound))
    context.artifacts['mixing_curve'] = curve
    metrics = {
        'mu_1': float(curve.mu[0]),
        'mu_n_max': float(curve.mu[-1]),
        'stderr': float(curve.stderr[-1]),
        'decay_ratio': curve.decay_ratio(),
        'bound_violations': violations,
        'constants': curve.constants.as_dict(),
        'bound_vanishing': [b for _, b in vanishing],
        'binned_check': binned,
        'n_paths': ensemble.n_paths,
    }
    return _result(context, Experiment.MIXING, metrics, {'mixing_curve': curve.rows()})


@experiment_guard(Experiment.CONSERVATIVITY)
def run_conservativity(context):
    if not context.has_subordinator:
        return not_applicable(Experiment.CONSERVATIVITY, 'no subordinator')
    config = context.config
    horizon = config.param('conservativity_n')
    ensemble = context.ensemble(lattice_grid(horizon), config.param('conservativity_paths'),
                                context.stream(Experiment.CONSERVATIVITY))
    check_probes_on_grid(config.param('conservativity_probes'), context.spatial_grid(ensemble, fitted=True))
    curve = conservativity_sum(ensemble, config.param('conservativity_probes'), horizon)
    recurrence = recurrence_check(ensemble, config.param('recurrence_level'))
    context.artifacts['recurrence'] = recurrence
    metrics = {
        'probes': list(curve.probes),
        'final_sums': [float(s) for s in curve.final()],
        'stderr': [float(s) for s in curve.stderr],
        'growth': [float(g) for g in curve.growth],
        'growth_stderr': [float(g) for g in curve.growth_stderr],
        'expected_growth': 1.0 - config.h_prime,
        'monotone': curve.monotone(),
        'recurrence': recurrence.as_dict(),
        'horizon': horizon,
    }
    return _result(context, Experiment.CONSERVATIVITY, metrics, {'conservativity': curve.rows()})


@experiment_guard(Experiment.EXTREME)
def run_extreme(context):
    if not context.has_subordinator:
        return not_applicable(Experiment.EXTREME, 'the indicator noise needs a subordinator')
    config = context.config
    ns = tuple(sorted(config.param('extreme_n')))
    n_max = ns[-1]
    n_replicates = config.param('extreme_replicates')
    rng = context.stream(Experiment.EXTREME)
    ensemble = context.ensemble(lattice_grid(n_max), config.param('extreme_paths'), rng.substream(0))
    x_grid = context.spatial_grid(ensemble, fitted=True)
    noise = simulate_noise(ensemble, x_grid, n_max, context.spec, rng.substream(1), n_replicates,
                           threads=context.threads, block_rows=context.settings['NOISE_BLOCK_ROWS'],
                           max_entries=context.settings['MAX_FIELD_ENTRIES'])
    context.record_truncation('extreme', ensemble, x_grid, [float(n_max)])
    curve = extreme_value_stat(np.stack([z.values for z in noise]), ns, config.alpha)

    unit = exponent_integral(LinearForm.single(1.0, 1.0), Kernel.indicator(), ensemble, x_grid, context.spec)
    scale = unit.exponent ** (1.0 / config.alpha)
    control = extreme_value_stat(iid_noise_control(config.alpha, n_max, n_replicates, rng.substream(2), scale),
                                 ns, config.alpha)
    metrics = {
        **curve.as_dict(),
        'control': control.as_dict(),
        'control_decay_ratio': control.decay_ratio(),
        'control_informative': config.alpha < 2.0,
        'noise_scale': scale,
    }
    return _result(context, Experiment.EXTREME, metrics)


@experiment_guard(Experiment.CLASSIFICATION)
def run_classification(context):
    if not context.has_subordinator:
        return not_applicable(Experiment.CLASSIFICATION, 'SaS Levy motion has i.i.d. (dissipative) increments')
    mixing = context.results[Experiment.MIXING]
    conservativity = context.results[Experiment.CONSERVATIVITY]
    feasibility = feasibility_check(context.spec, context.config.subordinator, context.config.process)
    flow = classify_flow(context.artifacts['recurrence'], mixing.passed, conservativity.passed,
                         feasibility, context.config.alpha,
                         min_fraction=context.tolerances['recurrence_fraction'])
    return _result(context, Experiment.CLASSIFICATION, flow.as_dict())


EXPERIMENTS = {
    Experiment.FEASIBILITY: run_feasibility,
    Experiment.SELFSIM: run_selfsim,
    Experiment.STATIONARITY: run_stationarity,
    Experiment.SIGNKERNEL: run_signkernel,
    Experiment.CHARMATCH: run_charmatch,
    Experiment.REFINEMENT: run_refinement,
    Experiment.LEVYREDUCTION: run_levyreduction,
    Experiment.GAUSSIANCOV: run_gaussiancov,
    Experiment.MIXING: run_mixing,
    Experiment.CONSERVATIVITY: run_conservativity,
    Experiment.EXTREME: run_extreme,
    Experiment.CLASSIFICATION: run_classification,
}
