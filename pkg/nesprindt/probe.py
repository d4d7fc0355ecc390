"""
Heterogeneity probe: split the large level of the nesting column into k
contiguous parts in row order, train one tree per part together with every
row of the small level, and report in-sample balanced accuracy per part.
A part whose training set holds only one class scores 0.5 and is flagged.
"""
import logging
from functools import partial

import numpy as np

from core.exceptions import DataError
from core.utils.parallel import run_ordered
from ctree.builder import grow_tree, predict_rows
from dataset.services import class_counts, minority_share, rows_with_level
from prindt.metrics import balanced_accuracy
from prindt.types import Scores
from sampling.services import binary_column, partition_in_order
from .config import resolve_predictors
from .types import ProbeResult

logger = logging.getLogger(__name__)

SINGLE_CLASS_SCORES = Scores(ba=0.5, acc_large=None, acc_small=None)


def heterogeneity_probe(d, cfg, threads=1):
    """
    Returns:
        list of ProbeResult, one per part in order
    """
    col = binary_column(d, cfg.nesting.column)
    if col.level_code(cfg.nesting.small_level) is None:
        raise DataError(
            f"Unknown level {cfg.nesting.small_level!r} for nesting column {cfg.nesting.column!r}; "
            f"known: {list(col.levels)}"
        )
    large_level = next(level for level in col.levels if level != cfg.nesting.small_level)
    predictors = resolve_predictors(d, cfg.predictors, cfg.nesting)

    large_rows = rows_with_level(d, cfg.nesting.column, large_level)
    small_rows = rows_with_level(d, cfg.nesting.column, cfg.nesting.small_level)
    parts = partition_in_order(d, large_rows, cfg.parts)

    jobs = []
    start = 0
    for number, part in enumerate(parts, start=1):
        jobs.append((number, start, part))
        start += len(part)

    results = run_ordered(partial(_probe_part, d, cfg, predictors, small_rows), jobs, threads=threads)
    flagged = [result.part for result in results if result.single_class]
    if flagged:
        logger.warning(f"Probe parts {flagged} trained on a single class; their ba is reported as 0.5")
    return results


def _probe_part(d, cfg, predictors, small_rows, job):
    number, start, part = job
    train = part.union(small_rows)
    large, small = class_counts(d, train)
    common = dict(
        part=number,
        start=start,
        stop=start + len(part),
        first_row=int(part.indices[0]),
        last_row=int(part.indices[-1]),
        part_size=len(part),
        train_size=len(train),
        small_share=minority_share(d, train),
    )
    if large == 0 or small == 0:
        return ProbeResult(scores=SINGLE_CLASS_SCORES, single_class=True, **common)

    tree = grow_tree(d, train, cfg.tree, predictors)
    scores = balanced_accuracy(predict_rows(tree, d, train), d.y[train.indices])
    logger.debug(f"Probe part {number}: rows {start}..{start + len(part) - 1}, ba={scores.ba:.4f}")
    return ProbeResult(scores=scores, tree=tree, **common)


def probe_spread(results):
    """Range of per-part ba; a large spread points at heterogeneity along row order."""
    values = np.array([result.ba for result in results], dtype=np.float64)
    return float(values.max() - values.min()) if values.size else 0.0
