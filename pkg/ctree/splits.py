"""
Split-variable selection and binary split search.

Both split searches maximise the Pearson chi-square of the 2 x 2
(side x class) table. Ties go to the first candidate in enumeration order:
the smallest threshold, or the lowest subset mask.
"""
import numpy as np

from dataset.types import CATEGORICAL, NUMERIC, SMALL
from .types import Split

EXHAUSTIVE_MAX_LEVELS = 12


def select_split_variable(tests, alpha):
    """
    Variable with the smallest adjusted p if that p is <= alpha, else None.
    Ties: larger statistic first, then the order of ``tests`` (schema order).
    """
    candidates = [(test.p_adjusted, -test.statistic, position, test)
                  for position, test in enumerate(tests) if test.tested]
    if not candidates:
        return None
    p_adjusted, _, _, best = min(candidates, key=lambda item: item[:3])
    if p_adjusted > alpha:
        return None
    return best


def find_split(d, within, variable, min_leaf=7):
    """Best admissible binary split of ``within`` on ``variable``, or None."""
    idx = d.check_indices(within)
    col = d.column_schema(variable)
    values = d.column(variable)[idx]
    y = d.y[idx]
    if col.is_categorical:
        return categorical_split(variable, values, col.levels, y, min_leaf)
    return numeric_split(variable, values, y, min_leaf)


def chi2_2x2(left_large, left_small, right_large, right_small):
    """Vectorised Pearson chi-square of 2 x 2 tables; 0 where a margin is empty."""
    a = np.asarray(left_large, dtype=float)
    b = np.asarray(left_small, dtype=float)
    c = np.asarray(right_large, dtype=float)
    dd = np.asarray(right_small, dtype=float)
    n = a + b + c + dd
    denominator = (a + b) * (c + dd) * (a + c) * (b + dd)
    with np.errstate(divide='ignore', invalid='ignore'):
        statistic = np.where(denominator > 0, n * (a * dd - b * c) ** 2 / denominator, 0.0)
    return statistic


def numeric_split(variable, values, y, min_leaf):
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind='stable')
    xs = values[order]
    small = (np.asarray(y)[order] == SMALL).astype(np.int64)
    n = xs.size
    boundaries = np.flatnonzero(np.diff(xs) > 0)
    if boundaries.size == 0:
        return None

    n_left = boundaries + 1
    admissible = (n_left >= min_leaf) & (n - n_left >= min_leaf)
    if not admissible.any():
        return None

    cumulative_small = np.cumsum(small)
    left_small = cumulative_small[boundaries]
    left_large = n_left - left_small
    total_small = int(cumulative_small[-1])
    statistic = chi2_2x2(left_large, left_small, (n - n_left) - (total_small - left_small), total_small - left_small)
    statistic = np.where(admissible, statistic, -1.0)

    best = int(np.argmax(statistic))
    cut = boundaries[best]
    return Split(
        variable=variable,
        kind=NUMERIC,
        threshold=float((xs[cut] + xs[cut + 1]) / 2.0),
        statistic=float(statistic[best]),
    )


def categorical_split(variable, codes, levels, y, min_leaf):
    codes = np.asarray(codes)
    observed = np.unique(codes)  # ascending code = schema level order
    n_levels = observed.size
    if n_levels < 2:
        return None

    lookup = np.searchsorted(observed, codes)
    level_n = np.bincount(lookup, minlength=n_levels)
    level_small = np.bincount(lookup, weights=(np.asarray(y) == SMALL), minlength=n_levels).astype(np.int64)

    if n_levels <= EXHAUSTIVE_MAX_LEVELS:
        membership = _exhaustive_subsets(n_levels)
    else:
        membership = _prefix_subsets(level_n, level_small)

    left_n = membership @ level_n
    left_small = membership @ level_small
    total_n = int(level_n.sum())
    total_small = int(level_small.sum())
    admissible = (left_n >= min_leaf) & (total_n - left_n >= min_leaf)
    if not admissible.any():
        return None

    statistic = chi2_2x2(left_n - left_small, left_small,
                         (total_n - left_n) - (total_small - left_small), total_small - left_small)
    statistic = np.where(admissible, statistic, -1.0)
    best = int(np.argmax(statistic))
    chosen = membership[best].astype(bool)
    return Split(
        variable=variable,
        kind=CATEGORICAL,
        left_levels=tuple(levels[code] for code in observed[chosen]),
        right_levels=tuple(levels[code] for code in observed[~chosen]),
        statistic=float(statistic[best]),
    )


def _exhaustive_subsets(n_levels):
    """
    The 2^(l-1) - 1 proper subsets that contain the first level, as a 0/1
    membership matrix ordered by mask over the remaining levels.
    """
    masks = np.arange(2 ** (n_levels - 1) - 1, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n_levels - 1)[None, :]) & 1
    return np.column_stack([np.ones(masks.size, dtype=np.int64), bits])


def _prefix_subsets(level_n, level_small):
    """
    Prefixes of the levels sorted by small-class share, each flipped to its
    complement when needed so the first level is always on the left.
    """
    n_levels = level_n.size
    share = level_small / level_n
    order = np.argsort(share, kind='stable')
    membership = np.zeros((n_levels - 1, n_levels), dtype=np.int64)
    for p in range(n_levels - 1):
        membership[p, order[:p + 1]] = 1
    flip = membership[:, 0] == 0
    membership[flip] = 1 - membership[flip]
    return membership
