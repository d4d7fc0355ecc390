"""
The nested undersampling driver: outer predictor-level undersamples, an
inner class-undersampling loop per outer sample, full-data re-scoring of
the kept trees and the two best-k ensemble strategies.
"""
import logging

import numpy as np

from core.exceptions import ConfigError, EmptyResultError
from ctree.builder import predict_rows
from dataset.services import class_counts, minority_share
from prindt.ensemble import build_ensemble, score_ensemble
from prindt.inner import run_inner_loop, top_k
from prindt.interpretability import validate_forbidden
from prindt.metrics import balanced_accuracy
from prindt.types import ScoredTree
from sampling.seeds import SeedStream
from sampling.services import undersample_level
from .config import resolve_predictors
from .types import BY_FULL, BY_OUTER, CRITERIA, EnsembleResult, NesReport, OuterResult

logger = logging.getLogger(__name__)

STRATEGY_A = 'A'
STRATEGY_B = 'B'
HISTOGRAM_BINS = 20


def outer_stream(cfg, outer_index):
    return SeedStream(cfg.master_seed).child('outer', outer_index)


def outer_sample(d, cfg, outer_index):
    """Rows of the small nesting level plus an equal-size draw from the other level."""
    return undersample_level(d, cfg.nesting.column, cfg.nesting.small_level, outer_stream(cfg, outer_index))


def nesprindt_run(d, cfg, threads=1, probe=None):
    """
    Run the full nested procedure.

    Args:
        d: loaded Dataset
        cfg: RunConfig
        threads: worker count for the inner loop; results do not depend on it
        probe: optional heterogeneity probe results to attach to the report

    Returns:
        NesReport
    """
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    predictors = resolve_predictors(d, cfg.predictors, cfg.nesting)
    if not predictors:
        raise ConfigError("No predictor columns remain after excluding the class and nesting columns")
    validate_forbidden(cfg.forbidden, d.schema)
    inner_cfg = cfg.inner_config(predictors)
    all_rows = d.all_rows()

    outer_results = []
    for i in range(1, cfg.outer_reps + 1):
        stream = outer_stream(cfg, i)
        under_out = outer_sample(d, cfg, i)
        inner = run_inner_loop(d, under_out, inner_cfg, stream, outer_index=i, threads=threads)
        top = tuple(
            _with_full_scores(item, d, all_rows)
            for item in top_k(inner.ranked, cfg.k_best)
        )
        share = minority_share(d, under_out)
        outer_results.append(OuterResult(
            outer=i,
            seed_path=stream.describe(),
            under_out=under_out,
            ranked=tuple(inner.ranked),
            top=top,
            fitted=inner.fitted,
            filtered=inner.filtered,
            minority_share=share,
        ))
        logger.info(
            f"Outer {i}/{cfg.outer_reps}: {len(under_out)} rows, small share {share:.4f}, "
            f"best {top[0].tree_id} ba_outer={top[0].ba_outer:.4f} ba_full={top[0].ba_full:.4f}"
        )

    kept = tuple(item for result in outer_results for item in result.top)
    strategy_a = tuple(_strategy_a(result, cfg, d, all_rows) for result in outer_results)
    strategy_a_best = max(strategy_a, key=lambda result: (result.scores.ba, -result.outer))
    strategy_b = _strategy_b(kept, cfg, d, all_rows)

    large, small = class_counts(d)
    report = NesReport(
        config=cfg,
        dataset={
            'rows': d.n_rows,
            'columns': list(d.column_names),
            'class_column': d.class_column,
            'large_level': d.large_level,
            'small_level': d.small_level,
            'large_count': large,
            'small_count': small,
        },
        predictors=predictors,
        outer=tuple(outer_results),
        kept=kept,
        best_by_outer=min(kept, key=ScoredTree.rank_key),
        best_by_full=min(kept, key=ScoredTree.full_rank_key),
        strategy_a=strategy_a,
        strategy_a_best=strategy_a_best,
        strategy_b=strategy_b,
        full_minority_share=minority_share(d),
        probe=tuple(probe) if probe is not None else None,
        summaries=_summaries(outer_results, kept),
    )
    if not report.same_best:
        logger.info(
            f"Best tree differs by criterion: {report.best_by_outer.tree_id} on its outer sample, "
            f"{report.best_by_full.tree_id} on the full data"
        )
    return report


def best_tree(report, criterion):
    if criterion == BY_OUTER:
        return report.best_by_outer
    if criterion == BY_FULL:
        return report.best_by_full
    raise ConfigError(f"Unknown criterion {criterion!r}; expected one of {list(CRITERIA)}")


def _with_full_scores(item, d, all_rows):
    scores = balanced_accuracy(predict_rows(item.tree, d, all_rows), d.y)
    return ScoredTree(
        tree=item.tree,
        outer=item.outer,
        inner=item.inner,
        percent_index=item.percent_index,
        percent=item.percent,
        outer_scores=item.outer_scores,
        full_scores=scores,
    )


def _strategy_a(result, cfg, d, all_rows):
    members = result.ranked[:cfg.ensemble_size]
    ensemble = build_ensemble(members)
    return EnsembleResult(
        strategy=STRATEGY_A,
        outer=result.outer,
        member_ids=tuple(item.tree_id for item in members),
        ensemble=ensemble,
        scores=score_ensemble(ensemble, d, result.under_out),
        full_scores=score_ensemble(ensemble, d, all_rows),
        scored_on='outer',
    )


def _strategy_b(kept, cfg, d, all_rows):
    if not kept:
        raise EmptyResultError("No trees were kept from the outer repetitions")
    members = sorted(kept, key=ScoredTree.full_rank_key)[:cfg.ensemble_size]
    ensemble = build_ensemble(members)
    scores = score_ensemble(ensemble, d, all_rows)
    return EnsembleResult(
        strategy=STRATEGY_B,
        outer=None,
        member_ids=tuple(item.tree_id for item in members),
        ensemble=ensemble,
        scores=scores,
        full_scores=scores,
        scored_on='full',
    )


def summarize(values, bins=HISTOGRAM_BINS):
    """Mean, standard deviation, quantiles and a histogram on [0, 1]."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return {'count': 0}
    counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
    q25, median, q75 = np.quantile(values, [0.25, 0.5, 0.75])
    return {
        'count': int(values.size),
        'mean': float(values.mean()),
        'std': float(values.std(ddof=1)) if values.size > 1 else 0.0,
        'min': float(values.min()),
        'q25': float(q25),
        'median': float(median),
        'q75': float(q75),
        'max': float(values.max()),
        'histogram': {'edges': [float(edge) for edge in edges], 'counts': [int(c) for c in counts]},
    }


def _summaries(outer_results, kept):
    scored = [item for result in outer_results for item in result.ranked]
    return {
        'ba_outer': summarize([item.ba_outer for item in scored]),
        'ba_full': summarize([item.ba_full for item in kept]),
        'acc_small_outer': summarize([item.outer_scores.acc_small for item in scored]),
        'acc_large_outer': summarize([item.outer_scores.acc_large for item in scored]),
    }
