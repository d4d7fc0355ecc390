"""
Inner loop: repeated class-undersampled tree fits on one outer sample.
"""
import logging
from dataclasses import dataclass
from functools import partial

from core.exceptions import EmptyResultError
from core.utils.parallel import run_ordered
from ctree.builder import grow_tree, predict_rows
from sampling.services import undersample_class
from sampling.types import UndersampleSpec
from .interpretability import find_forbidden_path
from .metrics import balanced_accuracy
from .types import ScoredTree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InnerResult:
    ranked: list
    fitted: int
    filtered: int


@dataclass(frozen=True)
class _InnerContext:
    d: object
    under_out: object
    cfg: object
    rng: object
    outer_index: int


def prindt_inner(d, under_out, cfg, rng, outer_index=1, threads=1):
    """
    Fit one tree per (repetition, percent) on a class undersample of
    ``under_out``, drop uninterpretable trees and score the rest on all of
    ``under_out``.

    Returns:
        list of ScoredTree, best ba_outer first (ties: earlier repetition)
    """
    return run_inner_loop(d, under_out, cfg, rng, outer_index=outer_index, threads=threads).ranked


def run_inner_loop(d, under_out, cfg, rng, outer_index=1, threads=1):
    """prindt_inner with fit/filter counts kept for the report."""
    jobs = [
        (inner, percent_index, percent)
        for inner in range(1, cfg.inner_reps + 1)
        for percent_index, percent in enumerate(cfg.percents, start=1)
    ]
    context = _InnerContext(d=d, under_out=under_out, cfg=cfg, rng=rng, outer_index=outer_index)
    results = run_ordered(partial(_fit_inner_job, context), jobs, threads=threads)

    survivors = [item for item in results if item is not None]
    filtered = len(results) - len(survivors)
    if filtered:
        logger.info(f"Outer {outer_index}: {filtered} of {len(results)} trees failed the interpretability filter")
    if not survivors:
        raise EmptyResultError(
            f"Outer repetition {outer_index}: all {len(results)} trees were filtered out as uninterpretable"
        )
    ranked = sorted(survivors, key=ScoredTree.rank_key)
    logger.debug(f"Outer {outer_index}: best ba_outer={ranked[0].ba_outer:.4f} ({ranked[0].tree_id})")
    return InnerResult(ranked=ranked, fitted=len(results), filtered=filtered)


def _fit_inner_job(context, job):
    inner, percent_index, percent = job
    stream = context.rng.child('inner', inner).child('percent', percent_index)
    under_in = undersample_class(
        context.d, context.under_out, UndersampleSpec(percent=percent), stream,
    )
    tree = grow_tree(context.d, under_in, context.cfg.tree, context.cfg.predictors)
    if find_forbidden_path(tree, context.cfg.forbidden) is not None:
        return None
    scores = balanced_accuracy(
        predict_rows(tree, context.d, context.under_out),
        context.d.y[context.under_out.indices],
    )
    return ScoredTree(
        tree=tree,
        outer=context.outer_index,
        inner=inner,
        percent_index=percent_index,
        percent=percent,
        outer_scores=scores,
    )


def top_k(scored, k):
    """First min(k, len) trees in ranking order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return sorted(scored, key=ScoredTree.rank_key)[:k]
