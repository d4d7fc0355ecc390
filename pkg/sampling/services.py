"""
Class undersampling, predictor-level undersampling and ordered partitioning.

Every function returns a RowIndexSet in ascending row order and leaves the
Dataset untouched.
"""
import logging
import math

import numpy as np

from core.exceptions import DataError, SamplingError
from dataset.services import rows_with_level
from dataset.types import LARGE, SMALL, RowIndexSet

logger = logging.getLogger(__name__)

# Absorbs binary representation error, e.g. 0.29 * 100 = 28.999999999999996.
FLOOR_TOLERANCE = 1e-9


def undersample_size(percent, n_large):
    return int(math.floor(percent * n_large + FLOOR_TOLERANCE))


def undersample_class(d, within, spec, rng):
    """
    All small-class rows of ``within`` plus floor(percent x L) large-class
    rows drawn uniformly without replacement.
    """
    idx = d.check_indices(within)
    y = d.y[idx]
    small_rows = idx[y == SMALL]
    large_rows = idx[y == LARGE]
    if small_rows.size == 0 or large_rows.size == 0:
        raise SamplingError(
            f"Class undersampling needs both classes; got {large_rows.size} large and {small_rows.size} small rows"
        )

    n_keep = undersample_size(spec.percent, large_rows.size)
    if n_keep == 0:
        raise SamplingError(
            f"percent={spec.percent} keeps no large-class rows out of {large_rows.size}; "
            f"a one-class training set cannot be split"
        )
    if n_keep == large_rows.size:
        kept = large_rows
    else:
        kept = rng.generator().choice(large_rows, size=n_keep, replace=False)
    return RowIndexSet(np.sort(np.concatenate([small_rows, kept])))


def undersample_level(d, column, small_level, rng):
    """
    All rows of ``small_level`` plus an equally large uniform draw, without
    replacement, from the other level of ``column``.
    """
    col = binary_column(d, column)
    if col.level_code(small_level) is None:
        raise DataError(f"Unknown level {small_level!r} for nesting column {column!r}; known: {list(col.levels)}")
    large_level = next(level for level in col.levels if level != small_level)

    small_rows = rows_with_level(d, column, small_level).indices
    large_rows = rows_with_level(d, column, large_level).indices
    if large_rows.size < small_rows.size:
        raise SamplingError(
            f"Level {large_level!r} has {large_rows.size} rows, fewer than the {small_rows.size} rows of "
            f"{small_level!r}; there is nothing to undersample (check the nesting configuration)"
        )
    drawn = rng.generator().choice(large_rows, size=small_rows.size, replace=False)
    return RowIndexSet(np.sort(np.concatenate([small_rows, drawn])))


def partition_in_order(d, within, k):
    """
    Contiguous, order-preserving split of ``within`` into k parts; the first
    |within| mod k parts hold one extra row.
    """
    idx = d.check_indices(within)
    if k < 2:
        raise SamplingError(f"An ordered partition needs k >= 2, got {k}")
    if k > idx.size:
        raise SamplingError(f"Cannot split {idx.size} rows into {k} non-empty parts")
    return [RowIndexSet(part) for part in np.array_split(idx, k)]


def binary_column(d, column):
    try:
        col = d.column_schema(column)
    except KeyError:
        raise DataError(f"Nesting column {column!r} not found")
    if not col.is_categorical:
        raise DataError(f"Nesting column {column!r} must be categorical")
    observed = np.unique(d.column(column))
    if len(col.levels) != 2 or observed.size != 2:
        raise DataError(
            f"Nesting column {column!r} must split the rows into exactly two levels, found {list(col.levels)}"
        )
    return col
