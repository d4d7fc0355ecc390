"""
Run orchestration shared by the management commands and the Celery task.
"""
import logging
from pathlib import Path

from core.exceptions import NesprindtError
from dataset.loaders import load_csv
from .config import parse_probe_config, parse_run_config
from .models import AnalysisRun
from .probe import heterogeneity_probe, probe_spread
from .report import write_probe_csv, write_run_outputs
from .runner import nesprindt_run

logger = logging.getLogger(__name__)


def run_analysis(data_path, out_dir, cfg, threads=1):
    """
    Load the data, run the nested procedure (plus the probe when
    ``cfg.probe_parts`` is set) and write every output file.

    Returns:
        dict: summary of the run with the written paths
    """
    d = load_csv(data_path, cfg.class_column, dict(cfg.schema_hint))
    logger.info(f"Loaded {d.n_rows} rows and {len(d.column_names)} columns from {data_path}")
    probe = None
    if cfg.probe_parts:
        probe = heterogeneity_probe(d, cfg.probe_config(), threads=threads)
    report = nesprindt_run(d, cfg, threads=threads, probe=probe)
    paths = write_run_outputs(report, out_dir)
    return {
        'success': True,
        'report': str(paths['report']),
        'trees_scored': len(report.scored_trees),
        'trees_kept': len(report.kept),
        'trees_filtered': sum(result.filtered for result in report.outer),
        'best_by_outer': report.best_by_outer.tree_id,
        'best_by_outer_ba': report.best_by_outer.ba_outer,
        'best_by_full': report.best_by_full.tree_id,
        'best_by_full_ba': report.best_by_full.ba_full,
        'same_best': report.same_best,
        'strategy_a_ba': report.strategy_a_best.scores.ba,
        'strategy_b_ba': report.strategy_b.scores.ba,
    }


def run_probe(data_path, out_dir, cfg, threads=1):
    d = load_csv(data_path, cfg.class_column, dict(cfg.schema_hint))
    results = heterogeneity_probe(d, cfg, threads=threads)
    path = write_probe_csv(results, out_dir)
    return {
        'success': True,
        'probe': str(path),
        'parts': [result.to_dict() for result in results],
        'spread': probe_spread(results),
    }


def record_run(kind, data_path, out_dir, document, threads=1):
    return AnalysisRun.objects.create(
        kind=kind,
        data_path=str(Path(data_path)),
        out_dir=str(Path(out_dir)),
        config=document,
        threads=threads,
    )


def process_analysis_run(run_id):
    """
    Execute a recorded AnalysisRun and store its outcome.

    Returns:
        dict: {'success': bool, 'run_id': int, 'summary' or 'error', 'exit_code'}
    """
    try:
        run = AnalysisRun.objects.get(pk=run_id)
    except AnalysisRun.DoesNotExist:
        logger.error(f"AnalysisRun {run_id} does not exist")
        return {'success': False, 'run_id': run_id, 'error': 'Run not found', 'exit_code': 1}

    run.mark_running()
    try:
        if run.kind == 'probe':
            summary = run_probe(run.data_path, run.out_dir, parse_probe_config(run.config), threads=run.threads)
        else:
            summary = run_analysis(run.data_path, run.out_dir, parse_run_config(run.config), threads=run.threads)
    except NesprindtError as e:
        logger.error(f"AnalysisRun {run.pk} failed: {e}")
        run.mark_failed(str(e), e.exit_code)
        return {'success': False, 'run_id': run.pk, 'error': str(e), 'exit_code': e.exit_code}
    except Exception as e:
        logger.error(f"AnalysisRun {run.pk} failed unexpectedly: {e}", exc_info=True)
        run.mark_failed(str(e), 1)
        return {'success': False, 'run_id': run.pk, 'error': str(e), 'exit_code': 1}

    run.mark_finished(summary)
    logger.info(f"AnalysisRun {run.pk} finished in {run.duration:.1f}s")
    return {'success': True, 'run_id': run.pk, 'summary': summary, 'exit_code': 0}
