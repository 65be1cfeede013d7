import time
import logging
from dataclasses import dataclass, field

from flask import current_app, has_app_context

from stablesim.runner.experiments import DEFAULT_SETTINGS, EXPERIMENTS, RunContext
from stablesim.runner.guards import safe_commit

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    config: object
    results: dict                        # Experiment -> ExperimentResult, canonical order
    truncation: dict = field(default_factory=dict)
    wall_time: float = 0.0
    cache_hits: int = 0
    cache_misses: int = 0
    notices: tuple = ()

    @property
    def passed(self):
        return all(r.passed for r in self.results.values())

    def failed(self):
        return [e.value for e, r in self.results.items() if not r.passed]


def resolve_experiments(requested):
    """Requested experiments plus their dependencies, in canonical order"""
    chosen = set(requested)
    pending = list(requested)
    while pending:
        for dependency in pending.pop().dependencies:
            if dependency not in chosen:
                logger.info(f"adding {dependency.value}, required by a requested experiment")
                chosen.add(dependency)
                pending.append(dependency)
    return sorted(chosen, key=lambda e: e.order)


def settings_from_app():
    if not has_app_context():
        return {}
    return {key: current_app.config[key] for key in DEFAULT_SETTINGS if key in current_app.config}


def run(config, threads=1, cache=None, settings=None, out_dir=None):
    """Execute the config's experiments and return the RunReport.

    Results depend only on (config, seed): every experiment draws from its own
    substream, and the thread count only splits replicates.
    """
    started = time.perf_counter()
    merged = {**settings_from_app(), **(settings or {})}
    context = RunContext(config, threads=threads, cache=cache, settings=merged)
    for notice in config.notices:
        logger.info(f"config notice: {notice}")

    for experiment in resolve_experiments(config.experiments):
        context.results[experiment] = EXPERIMENTS[experiment](context)

    report = RunReport(
        config=config,
        results=context.results,
        truncation=context.truncation,
        wall_time=time.perf_counter() - started,
        cache_hits=cache.hits if cache is not None else 0,
        cache_misses=cache.misses if cache is not None else 0,
        notices=tuple(config.notices),
    )
    verdict = 'PASS' if report.passed else f"FAIL ({', '.join(report.failed())})"
    logger.info(f"run finished in {report.wall_time:.1f}s: {verdict}")

    if out_dir is not None:
        from stablesim.runner.reports import write_report
        options = {}
        if has_app_context():
            options = {'timezone': current_app.config.get('REPORT_TIMEZONE', 'UTC'),
                       'schema_version': current_app.config.get('REPORT_SCHEMA_VERSION', 1)}
        write_report(report, out_dir, **options)
    record_run(report, out_dir)
    return report


def record_run(report, out_dir=None):
    """Add the run to the RunRecord ledger when an app context is available"""
    if not has_app_context():
        return None
    from stablesim import db
    from stablesim.models import RunRecord

    record = RunRecord(
        config_hash=report.config.config_hash(),
        seed=str(report.config.seed),
        process=report.config.process.value,
        alpha=report.config.alpha,
        passed=report.passed,
        wall_time=report.wall_time,
        cache_hits=report.cache_hits,
        out_dir=str(out_dir) if out_dir else None,
    )
    db.session.add(record)
    safe_commit()
    return record
