"""
Counting and selection on a loaded Dataset.
"""
import numpy as np

from core.exceptions import DataError
from .types import RowIndexSet


def class_counts(d, within=None):
    """Return (large, small) class counts over ``within`` (all rows if None)."""
    if within is None:
        y = d.y
    else:
        y = d.y[d.check_indices(within)]
    counts = np.bincount(y, minlength=2)
    return int(counts[0]), int(counts[1])


def rows_with_level(d, column, level):
    """Rows whose categorical cell equals ``level``, in original order."""
    try:
        col = d.column_schema(column)
    except KeyError:
        raise DataError(f"Unknown column {column!r}")
    if not col.is_categorical:
        raise DataError(f"Column {column!r} is numeric; a level selection needs a categorical column")
    code = col.level_code(level)
    if code is None:
        raise DataError(f"Unknown level {level!r} for column {column!r}; known levels: {list(col.levels)}")
    return RowIndexSet(np.flatnonzero(d.column(column) == code))


def minority_share(d, within=None):
    """Share of small-class rows over ``within`` (all rows if None)."""
    large, small = class_counts(d, within)
    total = large + small
    return small / total if total else 0.0
