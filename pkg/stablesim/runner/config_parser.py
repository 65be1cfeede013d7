"""
Run configs: INI-style text with flat sections.

    [run]           process, alpha, seed, n_paths, n_replicates
    [subordinator]  kind, hurst, beta, sigma
    [grid]          t_max, n_steps, half_width (number or 'auto'), cells_per_half
    [experiments]   run (comma list or 'all') and per-experiment parameters
    [tolerances]    verdict thresholds

Scalars are ints, floats or names; lists are comma separated and time
pairs are written s:t. Every violation found is reported, not just the first.
"""

import hashlib
import logging
import configparser
from dataclasses import dataclass, field, replace

import numpy as np

from stablesim.diagnostics.selfsim import MIN_DEFAULT_STEPS
from stablesim.errors import ConfigError, ParameterError
from stablesim.grids import TimeGrid
from stablesim.models import Experiment, ProcessKind, SubordinatorKind
from stablesim.oracle.char_functional import PANEL_HORIZON, PANEL_RESOLUTION
from stablesim.sampling.stable import U64_MAX, StableSpec
from stablesim.subordinators.spec import SubordinatorSpec, subordinator_violations

logger = logging.getLogger(__name__)

# Per-experiment parameters: name -> (type, default)
EXPERIMENT_PARAMS = {
    'selfsim_times': ('times', None),
    'selfsim_quantile': ('float', 0.5),
    'stationarity_span': ('floats', (1.0, 2.0, 5.0)),
    'stationarity_shifts': ('floats', (1.0, 5.0, 10.0)),
    'mixing_n_max': ('int', 200),
    'mixing_paths': ('int', 100_000),
    'conservativity_n': ('int', 10_000),
    'conservativity_probes': ('floats', (0.0, -0.5, 0.5)),
    'conservativity_paths': ('int', 1000),
    'recurrence_level': ('float', 1.0),
    'extreme_n': ('ints', (10, 100, 1000)),
    'extreme_replicates': ('int', 1000),
    'extreme_paths': ('int', 200),
    'gaussiancov_pairs': ('pairs', (
        (0.5, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (0.5, 2.0),
        (1.0, 3.0), (2.0, 3.0), (3.0, 3.0), (1.0, 5.0), (5.0, 5.0),
    )),
    'levy_thetas': ('floats', (0.5, 1.0, 2.0)),
    'simulate_times': ('times', None),
}

DEFAULT_TOLERANCES = {
    'selfsim_h': 0.05,
    'selfsim_r2': 0.99,
    'char_z': 3.0,
    'sign_z': 3.0,
    'refinement_z': 1.0,
    'levy_z': 3.0,
    'gaussiancov_rel': 0.03,
    'gaussiancov_h': 0.03,
    'ks_coefficient': 1.63,
    'mixing_decay': 0.1,
    'conservativity_min_sum': 10.0,
    'conservativity_growth': 0.1,
    'extreme_ratio': 0.5,
    'recurrence_fraction': 0.9,
}

SECTION_KEYS = {
    'run': {'process', 'alpha', 'seed', 'n_paths', 'n_replicates'},
    'subordinator': {'kind', 'hurst', 'beta', 'sigma'},
    'grid': {'t_max', 'n_steps', 'half_width', 'cells_per_half'},
    'experiments': {'run'} | set(EXPERIMENT_PARAMS),
    'tolerances': set(DEFAULT_TOLERANCES),
}

LEVY_NOTICE = ("H' = 1 is the degenerate Levy case: the kernel 1_[0,A_t] becomes 1_[0,t] "
               "and the process is SaS Levy motion")


@dataclass(frozen=True)
class RunConfig:
    process: ProcessKind
    alpha: float
    subordinator: object        # SubordinatorSpec, None on the Levy route
    t_max: float
    n_steps: int
    half_width: object          # None means fit from a pilot quantile
    cells_per_half: int
    n_paths: int
    n_replicates: int
    seed: int
    experiments: tuple
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    notices: tuple = field(default=(), compare=False)

    @property
    def stable_spec(self):
        return StableSpec(self.alpha)

    @property
    def time_grid(self):
        return TimeGrid(self.t_max, self.n_steps)

    @property
    def h_prime(self):
        if self.subordinator is None:
            return 1.0
        return self.subordinator.self_similarity_exponent

    def param(self, name):
        return self.params.get(name, EXPERIMENT_PARAMS[name][1])

    def tolerance(self, name):
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def with_seed(self, seed):
        if int(seed) != seed or not 0 <= seed <= U64_MAX:
            raise ConfigError([f"seed must be an unsigned 64-bit integer, got {seed}"])
        return replace(self, seed=int(seed))

    def config_hash(self):
        return hashlib.sha256(self.to_text().encode('utf-8')).hexdigest()

    def as_dict(self):
        return {
            'process': self.process.value,
            'alpha': self.alpha,
            'subordinator': self.subordinator.describe() if self.subordinator else None,
            'grid': {
                't_max': self.t_max,
                'n_steps': self.n_steps,
                'half_width': self.half_width if self.half_width is not None else 'auto',
                'cells_per_half': self.cells_per_half,
            },
            'n_paths': self.n_paths,
            'n_replicates': self.n_replicates,
            'seed': str(self.seed),
            'experiments': [e.value for e in self.experiments],
            'params': {k: _format_value(EXPERIMENT_PARAMS[k][0], v) for k, v in sorted(self.params.items())},
            'tolerances': dict(sorted(self.tolerances.items())),
        }

    def to_text(self):
        lines = ['[run]',
                 f'process = {self.process.value}',
                 f'alpha = {self.alpha!r}',
                 f'seed = {self.seed}',
                 f'n_paths = {self.n_paths}',
                 f'n_replicates = {self.n_replicates}',
                 '']
        if self.subordinator is not None:
            sub = self.subordinator
            lines += ['[subordinator]', f'kind = {sub.kind.value}']
            if sub.kind is SubordinatorKind.FBM:
                lines.append(f'hurst = {sub.hurst!r}')
            else:
                lines.append(f'beta = {sub.beta!r}')
            lines += [f'sigma = {sub.sigma!r}', '']
        half_width = 'auto' if self.half_width is None else repr(self.half_width)
        lines += ['[grid]',
                  f't_max = {self.t_max!r}',
                  f'n_steps = {self.n_steps}',
                  f'half_width = {half_width}',
                  f'cells_per_half = {self.cells_per_half}',
                  '',
                  '[experiments]',
                  'run = ' + ', '.join(e.value for e in self.experiments)]
        for key in sorted(self.params):
            lines.append(f'{key} = {_format_value(EXPERIMENT_PARAMS[key][0], self.params[key])}')
        lines += ['', '[tolerances]']
        for key in sorted(self.tolerances):
            lines.append(f'{key} = {self.tolerances[key]!r}')
        return '\n'.join(lines) + '\n'


def _format_value(kind, value):
    if value is None:
        return 'auto'
    if kind == 'pairs':
        return ', '.join(f'{s!r}:{t!r}' for s, t in value)
    if kind in ('floats', 'times'):
        return ', '.join(repr(float(v)) for v in value)
    if kind == 'ints':
        return ', '.join(str(int(v)) for v in value)
    return repr(value)


def _split(raw):
    return [item.strip() for item in raw.split(',') if item.strip()]


def _parse_value(kind, raw, where, violations):
    raw = raw.strip()
    try:
        if kind == 'int':
            try:
                return int(raw)
            except ValueError:
                value = float(raw)
                if value != int(value):
                    raise
                return int(value)
        if kind == 'float':
            return float(raw)
        if kind == 'floats':
            return tuple(float(v) for v in _split(raw))
        if kind == 'ints':
            return tuple(int(v) for v in _split(raw))
        if kind == 'times':
            if raw.lower() == 'auto':
                return None
            return tuple(float(v) for v in _split(raw))
        if kind == 'pairs':
            pairs = []
            for item in _split(raw):
                s, t = item.split(':')
                pairs.append((float(s), float(t)))
            return tuple(pairs)
    except (ValueError, OverflowError):
        violations.append(f"{where}: cannot read {raw!r} as {kind}")
        return None
    raise ParameterError(f"unknown value kind {kind}")


def _read(section, key, kind, default, violations):
    if section is None or key not in section:
        return default
    value = _parse_value(kind, section[key], f"[{section.name}] {key}", violations)
    return default if value is None and kind != 'times' else value


def _defaults(source):
    if source is None:
        from config import Config
        source = Config
    get = source.get if isinstance(source, dict) else (lambda k, d=None: getattr(source, k, d))
    return {
        'alpha': float(get('DEFAULT_ALPHA', 1.5)),
        'hurst': float(get('DEFAULT_HURST', 0.5)),
        't_max': float(get('DEFAULT_T_MAX', 10.0)),
        'n_steps': int(get('DEFAULT_N_STEPS', 1000)),
        'n_paths': int(get('DEFAULT_N_PATHS', 1000)),
        'n_replicates': int(get('DEFAULT_N_REPLICATES', 10000)),
        'seed': int(get('DEFAULT_SEED', 20240101)),
        'cells_per_half': int(get('CELLS_PER_HALF_AXIS', 500)),
    }


def _check_unknown(parser, strict, violations, notices):
    for name in parser.sections():
        if name not in SECTION_KEYS:
            message = f"unknown section [{name}]"
            (violations if strict else notices).append(message)
            continue
        for key in parser[name]:
            if key not in SECTION_KEYS[name]:
                message = f"unknown key '{key}' in [{name}]"
                (violations if strict else notices).append(message)


def _parse_experiments(section, violations):
    raw = section.get('run', 'all') if section is not None else 'all'
    if raw.strip().lower() == 'all':
        return tuple(Experiment)
    chosen = []
    for name in _split(raw):
        try:
            chosen.append(Experiment(name.lower()))
        except ValueError:
            known = ', '.join(e.value for e in Experiment)
            violations.append(f"unknown experiment '{name}' (known: {known})")
    return tuple(sorted(set(chosen), key=lambda e: e.order))


def _check_params(params, grid, violations):
    def on_grid(name, times):
        for t in times:
            if grid is not None and not grid.contains(t):
                violations.append(f"{name}: time {t} is not a point of the time grid")

    for name, value in params.items():
        kind = EXPERIMENT_PARAMS[name][0]
        if kind == 'int' and value < 1:
            violations.append(f"{name} must be a positive integer, got {value}")
        if kind == 'ints' and (not value or min(value) < 1):
            violations.append(f"{name} must be a nonempty list of positive integers")
    if 'selfsim_quantile' in params and not 0.0 < params['selfsim_quantile'] < 1.0:
        violations.append(f"selfsim_quantile must lie in (0,1), got {params['selfsim_quantile']}")
    if params.get('selfsim_times'):
        times = params['selfsim_times']
        if len(times) < 5 or min(times) <= 0 or max(times) / min(times) < 100.0 * (1 - 1e-9):
            violations.append("selfsim_times needs >= 5 positive times spanning >= 2 decades")
        on_grid('selfsim_times', times)
    if params.get('simulate_times'):
        on_grid('simulate_times', params['simulate_times'])
    if 'gaussiancov_pairs' in params:
        on_grid('gaussiancov_pairs', sorted({t for pair in params['gaussiancov_pairs'] for t in pair}))
    for name in ('stationarity_span', 'stationarity_shifts'):
        if name in params and (not params[name] or min(params[name]) < 0):
            violations.append(f"{name} must be a nonempty list of nonnegative times")
    if 'recurrence_level' in params and params['recurrence_level'] < 0:
        violations.append("recurrence_level must be nonnegative")


def _check_grid_coverage(experiments, params, grid, process, alpha, violations):
    """The form panel and default fit times must be representable on the time grid"""
    panel_users = {Experiment.CHARMATCH}
    if process is not ProcessKind.LEVY:
        panel_users |= {Experiment.SIGNKERNEL, Experiment.REFINEMENT}
    using_panel = sorted((e.value for e in panel_users & set(experiments)))
    if using_panel:
        if grid.t_max < PANEL_HORIZON:
            violations.append(f"{', '.join(using_panel)}: t_max must be >= {PANEL_HORIZON:g} "
                              f"to hold the form panel, got {grid.t_max:g}")
        if grid.dt > PANEL_RESOLUTION * (1 + 1e-9):
            violations.append(f"{', '.join(using_panel)}: the grid step {grid.dt:g} is coarser "
                              f"than the form panel spacing {PANEL_RESOLUTION:g}")

    fit_users = {Experiment.SELFSIM}
    if alpha == 2.0 and process is ProcessKind.IFSM:
        fit_users.add(Experiment.GAUSSIANCOV)
    using_fits = sorted((e.value for e in fit_users & set(experiments)))
    if using_fits and not params.get('selfsim_times') and grid.n_steps < MIN_DEFAULT_STEPS:
        violations.append(f"{', '.join(using_fits)}: default selfsim_times need n_steps >= "
                          f"{MIN_DEFAULT_STEPS}, got {grid.n_steps}")


def parse_config(text, strict=False, defaults=None):
    """Parse and validate a run config; raises ConfigError listing every violation"""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text or '')
    except configparser.Error as e:
        raise ConfigError([f"malformed config: {e}"]) from e

    d = _defaults(defaults)
    violations = []
    notices = []
    _check_unknown(parser, strict, violations, notices)

    run = parser['run'] if parser.has_section('run') else None
    sub = parser['subordinator'] if parser.has_section('subordinator') else None
    grid_section = parser['grid'] if parser.has_section('grid') else None
    exp = parser['experiments'] if parser.has_section('experiments') else None
    tol = parser['tolerances'] if parser.has_section('tolerances') else None

    process_name = (run.get('process', 'ifsm') if run is not None else 'ifsm').strip().lower()
    try:
        process = ProcessKind(process_name)
    except ValueError:
        violations.append(f"process must be one of ifsm, ltfsm, levy, got '{process_name}'")
        process = ProcessKind.IFSM

    alpha = _read(run, 'alpha', 'float', d['alpha'], violations)
    if not 0.0 < alpha <= 2.0:
        violations.append(f"alpha must lie in (0,2] (stability index), got {alpha}")
    seed = _read(run, 'seed', 'int', d['seed'], violations)
    if not 0 <= seed <= U64_MAX:
        violations.append(f"seed must be an unsigned 64-bit integer, got {seed}")
    n_paths = _read(run, 'n_paths', 'int', d['n_paths'], violations)
    n_replicates = _read(run, 'n_replicates', 'int', d['n_replicates'], violations)
    for name, value in (('n_paths', n_paths), ('n_replicates', n_replicates)):
        if value < 1:
            violations.append(f"{name} must be a positive integer, got {value}")

    kind_name = (sub.get('kind', 'fbm') if sub is not None else 'fbm').strip().lower()
    try:
        kind = SubordinatorKind(kind_name)
    except ValueError:
        violations.append(f"subordinator kind must be fbm or stable_levy, got '{kind_name}'")
        kind = SubordinatorKind.FBM
    hurst = _read(sub, 'hurst', 'float', d['hurst'] if kind is SubordinatorKind.FBM else None, violations)
    beta = _read(sub, 'beta', 'float', None, violations)
    sigma = _read(sub, 'sigma', 'float', 1.0, violations)

    subordinator = None
    degenerate = kind is SubordinatorKind.FBM and hurst == 1.0
    if process is ProcessKind.LEVY or degenerate:
        if process is not ProcessKind.LEVY:
            logger.info(LEVY_NOTICE)
        notices.append(LEVY_NOTICE)
        process = ProcessKind.LEVY
    else:
        problems = subordinator_violations(kind, hurst, beta, sigma)
        violations.extend(problems)
        if not problems:
            subordinator = SubordinatorSpec(kind, hurst=hurst if kind is SubordinatorKind.FBM else None,
                                            beta=beta if kind is SubordinatorKind.STABLE_LEVY else None,
                                            sigma=sigma)

    t_max = _read(grid_section, 't_max', 'float', d['t_max'], violations)
    n_steps = _read(grid_section, 'n_steps', 'int', d['n_steps'], violations)
    cells_per_half = _read(grid_section, 'cells_per_half', 'int', d['cells_per_half'], violations)
    half_width = None
    if grid_section is not None and grid_section.get('half_width', 'auto').strip().lower() != 'auto':
        half_width = _read(grid_section, 'half_width', 'float', None, violations)
        if half_width is not None and not half_width > 0:
            violations.append(f"half_width must be positive or 'auto', got {half_width}")
    if not t_max > 0:
        violations.append(f"t_max must be positive, got {t_max}")
    if n_steps < 1:
        violations.append(f"n_steps must be a positive integer, got {n_steps}")
    if cells_per_half < 1:
        violations.append(f"cells_per_half must be a positive integer, got {cells_per_half}")
    if process is ProcessKind.LEVY and half_width is not None and half_width < t_max:
        violations.append(f"the Levy kernel 1_[0,t] needs half_width >= t_max, got {half_width}")

    grid = None
    if t_max > 0 and n_steps >= 1:
        grid = TimeGrid(t_max, n_steps)

    experiments = _parse_experiments(exp, violations)
    params = {}
    for name, (kind_of, default) in EXPERIMENT_PARAMS.items():
        if exp is not None and name in exp:
            value = _parse_value(kind_of, exp[name], f"[experiments] {name}", violations)
            if value is not None or kind_of == 'times':
                params[name] = value
    _check_params(params, grid, violations)
    if grid is not None:
        _check_grid_coverage(experiments, params, grid, process, alpha, violations)

    tolerances = {}
    for name in DEFAULT_TOLERANCES:
        if tol is not None and name in tol:
            value = _parse_value('float', tol[name], f"[tolerances] {name}", violations)
            if value is not None:
                if not value > 0:
                    violations.append(f"tolerance {name} must be positive, got {value}")
                tolerances[name] = value

    if violations:
        raise ConfigError(violations)
    for notice in notices:
        if notice != LEVY_NOTICE:
            logger.warning(f"config: {notice}")

    return RunConfig(
        process=process, alpha=float(alpha), subordinator=subordinator,
        t_max=float(t_max), n_steps=int(n_steps), half_width=half_width,
        cells_per_half=int(cells_per_half), n_paths=int(n_paths),
        n_replicates=int(n_replicates), seed=int(seed), experiments=experiments,
        params=params, tolerances=tolerances, notices=tuple(notices),
    )


def load_config(path=None, strict=False, defaults=None):
    if path is None:
        return parse_config('', strict=strict, defaults=defaults)
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError([f"cannot read config {path}: {e}"]) from e
    return parse_config(text, strict=strict, defaults=defaults)


def grid_times(config, times):
    """Round times to the nearest points of the config's time grid, dropping duplicates"""
    dt = config.time_grid.dt
    rounded = np.round(np.asarray(times, dtype=float) / dt) * dt
    return tuple(float(t) for t in np.unique(np.round(rounded, 12)))
