"""
Report files of a run.

report.json holds only numbers that depend on (config, seed), so two runs of
the same config give byte-identical files. Wall time, cache counters and
timestamps go to run_meta.json.
"""

import io
import os
import math
import logging
from datetime import datetime

import numpy as np
import pandas as pd
import pytz
import ujson
from reportlab.lib import colors
from reportlab.lib.colors import HexColor
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table as ReportTable, TableStyle

from stablesim.errors import CacheError
from stablesim.models import Experiment
from stablesim.runner.config_parser import DEFAULT_TOLERANCES
from stablesim.runner.experiments import VERDICTS

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
REPORT_FILE = 'report.json'
META_FILE = 'run_meta.json'
CSV_COLUMNS = {
    'mixing_curve': ['n', 'mu', 'stderr', 'bound'],
    'exponent_fits': ['config', 'H_hat', 'stderr', 'r_squared', 'expected_H'],
    'conservativity': ['x', 'N', 'S'],
}


def _clean(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def report_document(report, schema_version=SCHEMA_VERSION):
    return _clean({
        'schema_version': schema_version,
        'config': report.config.as_dict(),
        'passed': report.passed,
        'experiments': {e.value: r.as_dict() for e, r in report.results.items()},
        'truncation_ledger': report.truncation,
        'notices': list(report.notices),
    })


def write_report(report, out_dir, timezone='UTC', schema_version=SCHEMA_VERSION):
    os.makedirs(out_dir, exist_ok=True)
    document = report_document(report, schema_version)
    with open(os.path.join(out_dir, REPORT_FILE), 'w', encoding='utf-8') as handle:
        handle.write(ujson.dumps(document, sort_keys=True, indent=2))
        handle.write('\n')

    tables = {}
    for result in report.results.values():
        for name, rows in result.tables.items():
            tables.setdefault(name, []).extend(rows)
    for name, rows in sorted(tables.items()):
        frame = pd.DataFrame(rows, columns=CSV_COLUMNS.get(name))
        frame.to_csv(os.path.join(out_dir, f'{name}.csv'), index=False)

    tz = pytz.timezone(timezone)
    meta = {
        'finished_at': datetime.now(tz).isoformat(),
        'wall_time': report.wall_time,
        'cache_hits': report.cache_hits,
        'cache_misses': report.cache_misses,
        'config_hash': report.config.config_hash(),
    }
    with open(os.path.join(out_dir, META_FILE), 'w', encoding='utf-8') as handle:
        handle.write(ujson.dumps(_clean(meta), sort_keys=True, indent=2))
        handle.write('\n')
    logger.info(f"report written to {out_dir} ({len(tables)} CSV tables)")
    return document


def load_report(out_dir):
    path = os.path.join(out_dir, REPORT_FILE)
    try:
        with open(path, encoding='utf-8') as handle:
            return ujson.loads(handle.read())
    except (OSError, ValueError) as e:
        raise CacheError(f"cannot load report {path}: {e}") from e


def _overlay_csv(out_dir, name, metrics):
    """Replace the metrics an experiment shares with its CSV by the CSV values"""
    path = os.path.join(out_dir, f'{name}.csv')
    if not os.path.exists(path):
        return metrics
    frame = pd.read_csv(path)
    metrics = dict(metrics)
    if name == 'mixing_curve' and len(frame):
        metrics['decay_ratio'] = float(frame['mu'].iloc[-1] / frame['mu'].iloc[0]) if frame['mu'].iloc[0] > 0 else 0.0
        metrics['bound_violations'] = int((frame['mu'] > frame['bound']).sum())
    elif name == 'exponent_fits' and len(frame):
        metrics['H_hat'] = float(frame['H_hat'].iloc[0])
        metrics['r_squared'] = float(frame['r_squared'].iloc[0])
    elif name == 'conservativity' and len(frame):
        final = frame.loc[frame.groupby('x', sort=False)['N'].idxmax()]
        metrics['final_sums'] = [float(s) for s in final['S']]
        metrics['monotone'] = bool(metrics.get('monotone', True)) and bool(all(
            (group.sort_values('N')['S'].diff().dropna() >= 0).all() for _, group in frame.groupby('x')))
    return metrics


_CSV_FOR = {
    Experiment.MIXING: 'mixing_curve',
    Experiment.SELFSIM: 'exponent_fits',
    Experiment.CONSERVATIVITY: 'conservativity',
}


def rederive_verdicts(out_dir):
    """Verdicts recomputed from report.json metrics and the CSV files"""
    document = load_report(out_dir)
    tolerances = {**DEFAULT_TOLERANCES, **document['config'].get('tolerances', {})}
    verdicts = {}
    for name, entry in document['experiments'].items():
        if not entry['applicable']:
            verdicts[name] = True
            continue
        experiment = Experiment(name)
        metrics = entry['metrics']
        if experiment in _CSV_FOR:
            metrics = _overlay_csv(out_dir, _CSV_FOR[experiment], metrics)
        verdicts[name] = bool(VERDICTS[experiment](metrics, tolerances))
    return verdicts


def _headline(name, metrics):
    """One number per experiment for the summary table"""
    keys = {
        'feasibility': 'H', 'selfsim': 'H_hat', 'stationarity': 'distance',
        'signkernel': 'max_z', 'charmatch': 'max_z', 'refinement': 'z',
        'levyreduction': 'max_z', 'gaussiancov': 'max_relative_error',
        'mixing': 'decay_ratio', 'extreme': 'decay_ratio',
    }
    if name == 'conservativity':
        sums = metrics.get('final_sums') or []
        return f"min S_N = {min(sums):.3g}" if sums else ''
    if name == 'classification':
        return 'conservative, null' if metrics.get('conservative') and metrics.get('null') else 'inconsistent'
    key = keys.get(name)
    value = metrics.get(key) if key else None
    return f"{key} = {value:.4g}" if isinstance(value, (int, float)) else ''


def summary_rows(document, rederived=None):
    rows = []
    ordered = sorted(document['experiments'].items(), key=lambda item: Experiment(item[0]).order)
    for name, entry in ordered:
        if not entry['applicable']:
            verdict = 'n/a'
        else:
            verdict = 'PASS' if entry['passed'] else 'FAIL'
        row = [name, verdict, _headline(name, entry['metrics'])]
        if rederived is not None:
            row.append('yes' if rederived.get(name) == entry['passed'] else 'NO')
        rows.append(row)
    return rows


def generate_summary_pdf(document, rederived=None, generated_at=None, recent_runs=()):
    """Tabular PDF summary of a report"""
    buffer = io.BytesIO()
    doc = SimpleDocTemplate(buffer, pagesize=A4, rightMargin=72, leftMargin=72, topMargin=72, bottomMargin=18)
    elements = []

    styles = getSampleStyleSheet()
    title_style = ParagraphStyle(
        'CustomTitle',
        parent=styles['Heading1'],
        fontSize=20,
        spaceAfter=24,
        alignment=1,
        textColor=HexColor('#2c3e50')
    )
    heading_style = ParagraphStyle(
        'CustomHeading',
        parent=styles['Heading2'],
        fontSize=14,
        spaceAfter=12,
        textColor=HexColor('#34495e')
    )

    config = document['config']
    elements.append(Paragraph("stablesim verification report", title_style))
    subordinator = config.get('subordinator') or {}
    run_info = f"""
    <b>Process:</b> {config['process']}<br/>
    <b>alpha:</b> {config['alpha']}<br/>
    <b>Subordinator:</b> {subordinator.get('kind', 'none (Levy route)')}<br/>
    <b>Seed:</b> {config['seed']}<br/>
    <b>Paths / replicates:</b> {config['n_paths']} / {config['n_replicates']}<br/>
    <b>Overall verdict:</b> {'PASS' if document['passed'] else 'FAIL'}
    """
    elements.append(Paragraph(run_info, styles['Normal']))
    elements.append(Spacer(1, 20))

    elements.append(Paragraph("Experiments", heading_style))
    header = ['Experiment', 'Verdict', 'Headline']
    if rederived is not None:
        header.append('Re-derived')
    table = ReportTable([header] + summary_rows(document, rederived))
    table.setStyle(TableStyle([
        ('BACKGROUND', (0, 0), (-1, 0), HexColor('#3498db')),
        ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
        ('ALIGN', (0, 0), (-1, -1), 'CENTER'),
        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ('FONTSIZE', (0, 0), (-1, 0), 11),
        ('BOTTOMPADDING', (0, 0), (-1, 0), 10),
        ('BACKGROUND', (0, 1), (-1, -1), HexColor('#ecf0f1')),
        ('GRID', (0, 0), (-1, -1), 1, colors.black)
    ]))
    elements.append(table)
    elements.append(Spacer(1, 20))

    ledger = document.get('truncation_ledger') or {}
    if ledger:
        elements.append(Paragraph("Truncation ledger", heading_style))
        ledger_rows = [['Experiment', 't', "E'[(|A_t| - X)+]"]]
        for label, entries in sorted(ledger.items()):
            for t, mass in entries.items():
                ledger_rows.append([label, t, f"{mass:.3e}" if mass is not None else ''])
        ledger_table = ReportTable(ledger_rows, colWidths=[2 * inch, 1 * inch, 2 * inch])
        ledger_table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), HexColor('#27ae60')),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
            ('ALIGN', (0, 0), (-1, -1), 'CENTER'),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('BACKGROUND', (0, 1), (-1, -1), HexColor('#d5f4e6')),
            ('GRID', (0, 0), (-1, -1), 1, colors.black)
        ]))
        elements.append(ledger_table)
        elements.append(Spacer(1, 20))

    if recent_runs:
        elements.append(Paragraph("Recent runs", heading_style))
        run_rows = [['When', 'Process', 'alpha', 'Verdict', 'Wall time (s)']]
        for record in recent_runs:
            run_rows.append([
                record.created_at.strftime('%Y-%m-%d %H:%M') if record.created_at else '',
                record.process, f"{record.alpha:g}",
                'PASS' if record.passed else 'FAIL', f"{record.wall_time:.1f}",
            ])
        runs_table = ReportTable(run_rows)
        runs_table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), HexColor('#34495e')),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
            ('GRID', (0, 0), (-1, -1), 1, colors.black)
        ]))
        elements.append(runs_table)

    generated_at = generated_at or datetime.now(pytz.utc)
    elements.append(Paragraph(f"<br/><i>Generated at: {generated_at.strftime('%Y-%m-%d %H:%M:%S %Z')}</i>",
                              styles['Normal']))
    doc.build(elements)
    buffer.seek(0)
    return buffer


def write_samples_csv(path, times, values, kernel, alpha, h_prime):
    """Long-format samples: replicate_id, t, value, kernel, alpha, H_prime"""
    n_replicates, n_times = values.shape
    frame = pd.DataFrame({
        'replicate_id': np.repeat(np.arange(n_replicates), n_times),
        't': np.tile(np.asarray(times, dtype=float), n_replicates),
        'value': np.asarray(values, dtype=float).ravel(),
    })
    frame['kernel'] = kernel.value
    frame['alpha'] = alpha
    frame['H_prime'] = h_prime
    frame.to_csv(path, index=False)
    return len(frame)


def write_paths_csv(path, ensemble):
    """Long-format subordinator paths: path_id, t, A"""
    n_paths, n_points = ensemble.paths.shape
    frame = pd.DataFrame({
        'path_id': np.repeat(np.arange(n_paths), n_points),
        't': np.tile(ensemble.grid.points, n_paths),
        'A': ensemble.paths.ravel(),
    })
    frame.to_csv(path, index=False)
    return len(frame)
