"""
Command line: flask --app run.py <command>, or python run.py <command>.

    verify        run the experiments of a config and write the report
    simulate      replicate samples of the configured process as CSV
    oracle        characteristic-functional exponents as JSON
    report        re-derive verdicts from a report directory
    export-paths  subordinator paths as CSV

Exit codes: 0 when every verdict passes, 1 on a failed verdict or a module
error, 2 on an invalid config.
"""

import os
import functools
import logging

import click
import numpy as np
import ujson
from flask import current_app
from flask.cli import with_appcontext

from stablesim.errors import ConfigError, StableSimError
from stablesim.oracle import LinearForm, exponent_integral, form_times, panel_on_grid
from stablesim.runner.cache import EnsembleCache
from stablesim.runner.config_parser import grid_times, load_config
from stablesim.runner.experiments import RunContext
from stablesim.runner.orchestrator import run, settings_from_app
from stablesim.runner import reports

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_CONFIG = 2
SIMULATE_STREAM = 1000      # root stream of the simulate command, clear of the experiment streams
SIMULATE_POINTS = 11


def run_options(func):
    """--config, --seed, --out, --threads and --strict, shared by the run commands"""
    @click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
                  help='Run config file (defaults apply when omitted)')
    @click.option('--seed', type=int, default=None, help='Unsigned 64-bit seed, overrides the config')
    @click.option('--out', 'out_dir', type=click.Path(file_okay=False), default='results',
                  show_default=True, help='Output directory')
    @click.option('--threads', type=int, default=None, help='Worker threads (results do not depend on it)')
    @click.option('--strict', is_flag=True, help='Reject unknown config keys')
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)
    return wrapper


def _fail(code, lines):
    for line in lines:
        click.echo(line, err=True)
    raise click.exceptions.Exit(code)


def _load(config_path, seed, strict):
    try:
        config = load_config(config_path, strict=strict, defaults=current_app.config)
        if seed is not None:
            config = config.with_seed(seed)
    except ConfigError as e:
        _fail(EXIT_CONFIG, ['invalid config:'] + [f'  - {v}' for v in e.violations])
    for notice in config.notices:
        click.echo(f'notice: {notice}', err=True)
    return config


def _threads(threads):
    return threads if threads is not None else current_app.config.get('DEFAULT_THREADS', 1)


def _cache():
    return EnsembleCache(current_app.config['CACHE_DIR'])


def parse_form(text):
    """'thetas;t;s' with comma-separated entries, e.g. '1,-1;1,2;0,0'"""
    try:
        thetas, t, s = (tuple(float(v) for v in part.split(',')) for part in text.split(';'))
        return LinearForm(thetas, t, s)
    except (ValueError, StableSimError) as e:
        raise click.BadParameter(f"cannot read form {text!r}: {e}") from e


@click.command('verify')
@run_options
@click.option('--no-cache', is_flag=True, help='Generate ensembles without the binary cache')
@with_appcontext
def verify_command(config_path, seed, out_dir, threads, strict, no_cache):
    """Run the configured experiments and write report.json and the CSV tables."""
    config = _load(config_path, seed, strict)
    try:
        report = run(config, threads=_threads(threads), cache=None if no_cache else _cache(),
                     out_dir=out_dir)
    except StableSimError as e:
        _fail(EXIT_FAILED, [f'error: {e}'])

    for experiment, result in report.results.items():
        verdict = 'n/a' if not result.applicable else ('PASS' if result.passed else 'FAIL')
        click.echo(f'{experiment.value:<16} {verdict}')
    click.echo(f'report written to {out_dir}')
    if not report.passed:
        raise click.exceptions.Exit(EXIT_FAILED)


@click.command('simulate')
@run_options
@click.option('--replicates', type=int, default=None, help='Overrides n_replicates of the config')
@click.option('--cache-fields', is_flag=True, help='Serve noise fields through the binary cache (single thread)')
@with_appcontext
def simulate_command(config_path, seed, out_dir, threads, strict, replicates, cache_fields):
    """Simulate replicates of the configured process and write samples.csv."""
    from stablesim.engine import sample_matrix, simulate_process

    config = _load(config_path, seed, strict)
    cache = _cache()
    context = RunContext(config, threads=_threads(threads), cache=cache, settings=settings_from_app())
    times = config.param('simulate_times') or np.linspace(0.0, config.t_max, SIMULATE_POINTS)
    times = grid_times(config, times)
    n_replicates = replicates or config.n_replicates
    try:
        ensemble = context.main_ensemble()
        x_grid = context.spatial_grid(ensemble)
        kernel = context.kernel(ensemble, x_grid, times)
        rng = context.root.stream(SIMULATE_STREAM)
        if cache_fields:
            n_paths = ensemble.n_paths if ensemble is not None else 1
            source = cache.field_source(x_grid, n_paths, context.spec, rng,
                                        block_rows=context.settings['NOISE_BLOCK_ROWS'],
                                        max_entries=context.settings['MAX_FIELD_ENTRIES'])
            samples = simulate_process(kernel, ensemble, x_grid, times, context.spec, rng, n_replicates,
                                       threads=1, field_source=source)
            times, values = sample_matrix(samples)
        else:
            times, values = context.simulate(kernel, ensemble, x_grid, times, rng, n_replicates=n_replicates)
    except StableSimError as e:
        _fail(EXIT_FAILED, [f'error: {e}'])

    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, 'samples.csv')
    rows = reports.write_samples_csv(path, times, values, kernel.variant, config.alpha, config.h_prime)
    click.echo(f'{rows} rows written to {path}')


@click.command('oracle')
@run_options
@click.option('--form', 'forms', multiple=True, help="Linear form 'thetas;t;s', e.g. '1,-1;1,2;0,0'")
@with_appcontext
def oracle_command(config_path, seed, out_dir, threads, strict, forms):
    """Print exp(-I) for each form (the default panel, moved onto the grid, when --form is not given)."""
    config = _load(config_path, seed, strict)
    panel = [parse_form(text) for text in forms] or panel_on_grid(config.time_grid)
    times = form_times(panel)
    off_grid = [t for t in times if not config.time_grid.contains(t)]
    if off_grid:
        raise click.BadParameter(f"form times {off_grid} are not points of the time grid", param_hint='--form')

    context = RunContext(config, threads=_threads(threads), cache=_cache(), settings=settings_from_app())
    try:
        ensemble = context.main_ensemble()
        x_grid = context.spatial_grid(ensemble)
        kernel = context.kernel(ensemble, x_grid, times)
        entries = []
        for form in panel:
            estimate = exponent_integral(form, kernel, ensemble, x_grid, context.spec)
            entries.append({'form': form.as_dict(), **estimate.as_dict()})
    except StableSimError as e:
        _fail(EXIT_FAILED, [f'error: {e}'])
    click.echo(ujson.dumps(entries, indent=2))


@click.command('report')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False, exists=True), default='results',
              show_default=True, help='Directory written by verify')
@click.option('--pdf', is_flag=True, help='Also write summary.pdf')
@click.option('--runs', type=int, default=5, show_default=True, help='Recent runs listed from the ledger')
@with_appcontext
def report_command(out_dir, pdf, runs):
    """Re-derive verdicts from report.json and the CSV tables and print a summary."""
    from stablesim.models import RunRecord

    try:
        document = reports.load_report(out_dir)
        rederived = reports.rederive_verdicts(out_dir)
    except StableSimError as e:
        _fail(EXIT_FAILED, [f'error: {e}'])

    click.echo(f"{'experiment':<16} {'verdict':<8} {'re-derived':<11} headline")
    for name, verdict, headline, matches in reports.summary_rows(document, rederived):
        click.echo(f'{name:<16} {verdict:<8} {matches:<11} {headline}')

    recent = RunRecord.query.order_by(RunRecord.created_at.desc()).limit(runs).all() if runs > 0 else []
    if recent:
        click.echo('\nrecent runs:')
        for record in recent:
            verdict = 'PASS' if record.passed else 'FAIL'
            click.echo(f'  {record.created_at:%Y-%m-%d %H:%M}  {record.process:<6} alpha={record.alpha:g}  '
                       f'{verdict}  {record.wall_time:.1f}s  {record.out_dir or ""}')

    if pdf:
        buffer = reports.generate_summary_pdf(document, rederived, recent_runs=recent)
        path = os.path.join(out_dir, 'summary.pdf')
        with open(path, 'wb') as handle:
            handle.write(buffer.getvalue())
        click.echo(f'PDF written to {path}')

    mismatched = [name for name, entry in document['experiments'].items() if rederived[name] != entry['passed']]
    if mismatched:
        _fail(EXIT_FAILED, [f"re-derived verdicts differ from report.json: {', '.join(mismatched)}"])
    if not document['passed']:
        raise click.exceptions.Exit(EXIT_FAILED)


@click.command('export-paths')
@run_options
@with_appcontext
def export_paths_command(config_path, seed, out_dir, threads, strict):
    """Write the subordinator ensemble of the config as paths.csv."""
    config = _load(config_path, seed, strict)
    if config.subordinator is None:
        _fail(EXIT_CONFIG, ["the H' = 1 route has no subordinator paths to export"])
    context = RunContext(config, threads=_threads(threads), cache=_cache(), settings=settings_from_app())
    try:
        ensemble = context.main_ensemble()
    except StableSimError as e:
        _fail(EXIT_FAILED, [f'error: {e}'])
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, 'paths.csv')
    rows = reports.write_paths_csv(path, ensemble)
    click.echo(f'{rows} rows written to {path}')


def register_commands(app):
    for command in (verify_command, simulate_command, oracle_command, report_command, export_paths_command):
        app.cli.add_command(command)
