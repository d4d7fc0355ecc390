"""
Tree growth and prediction.
"""
import itertools
import logging

import numpy as np

from core.exceptions import DataError
from dataset.types import LARGE, SMALL
from .splits import categorical_split, numeric_split, select_split_variable
from .stats import test_variables
from .types import Node, Tree

logger = logging.getLogger(__name__)


def grow_tree(d, within, params, predictors=None):
    """
    Grow a significance-gated tree on the rows ``within``.

    A node becomes a leaf when it has fewer than min_split rows, reached
    max_depth, is class-pure, has no predictor with adjusted p <= alpha, or
    admits no split with both children >= min_leaf.
    """
    predictors = tuple(predictors or d.predictor_names)
    for name in predictors:
        if name == d.class_column:
            raise DataError(f"The class column {name!r} cannot be a predictor")
        try:
            d.column_schema(name)
        except KeyError:
            raise DataError(f"Unknown predictor column {name!r}")

    idx = d.check_indices(within)
    if idx.size == 0:
        raise DataError("Cannot grow a tree on an empty row set")
    builder = _TreeBuilder(d, params, predictors)
    root = builder.grow(idx, depth=0)
    return Tree(
        root=root,
        params=params,
        columns=tuple(d.column_schema(name) for name in predictors),
        class_levels=tuple(d.class_levels),
    )


class _TreeBuilder:
    def __init__(self, d, params, predictors):
        self.d = d
        self.params = params
        self.predictors = predictors
        self.ids = itertools.count(1)

    def grow(self, idx, depth):
        node_id = next(self.ids)
        y = self.d.y[idx]
        n_small = int(np.count_nonzero(y == SMALL))
        n_large = int(idx.size - n_small)
        leaf = Node(node_id=node_id, depth=depth, n_large=n_large, n_small=n_small)

        if idx.size < self.params.min_split:
            return leaf
        if self.params.max_depth is not None and depth >= self.params.max_depth:
            return leaf
        if n_small == 0 or n_large == 0:
            return leaf

        tests = test_variables(self.d, idx, self.predictors)
        chosen = select_split_variable(tests, self.params.alpha)
        if chosen is None:
            return leaf

        split = self._split(idx, chosen.variable)
        if split is None:
            return leaf

        goes_left = route_left(split, self.d, idx)
        left = self.grow(idx[goes_left], depth + 1)
        right = self.grow(idx[~goes_left], depth + 1)
        return Node(
            node_id=node_id,
            depth=depth,
            n_large=n_large,
            n_small=n_small,
            test=chosen,
            split=split,
            left=left,
            right=right,
        )

    def _split(self, idx, variable):
        col = self.d.column_schema(variable)
        values = self.d.column(variable)[idx]
        y = self.d.y[idx]
        if col.is_categorical:
            return categorical_split(variable, values, col.levels, y, self.params.min_leaf)
        return numeric_split(variable, values, y, self.params.min_leaf)


def route_left(split, d, idx, prefer_left=True):
    """
    Boolean mask over ``idx``: True where the row goes to the left child.
    Categorical levels unseen by the split follow ``prefer_left``.
    """
    values = d.column(split.variable)[idx]
    if split.is_numeric:
        return values <= split.threshold
    col = d.column_schema(split.variable)
    left_codes = [code for code in map(col.level_code, split.left_levels) if code is not None]
    right_codes = [code for code in map(col.level_code, split.right_levels) if code is not None]
    goes_left = np.isin(values, left_codes)
    unseen = ~goes_left & ~np.isin(values, right_codes)
    if prefer_left:
        goes_left = goes_left | unseen
    return goes_left


def leaf_for(t, row):
    """Route a {column: value} record to its leaf."""
    node = t.root
    while not node.is_leaf:
        node = node.left if _goes_left(node, row) else node.right
    return node


def _goes_left(node, row):
    split = node.split
    try:
        value = row[split.variable]
    except KeyError:
        raise DataError(f"Row has no value for split variable {split.variable!r}")
    if split.is_numeric:
        return float(value) <= split.threshold
    value = str(value)
    if value in split.left_levels:
        return True
    if value in split.right_levels:
        return False
    # Unseen level: follow the child that saw more training rows.
    return node.left.n >= node.right.n


def predict(t, row):
    """Return (class label, (p_large, p_small)); an exact tie goes to the small class."""
    probabilities = leaf_for(t, row).probabilities
    code = SMALL if probabilities[SMALL] >= probabilities[LARGE] else LARGE
    return t.class_levels[code], probabilities


def predict_proba_rows(t, d, within):
    """(n, 2) array of leaf probability pairs for the rows ``within``."""
    _check_compatible(t, d)
    idx = d.check_indices(within)
    probabilities = np.empty((idx.size, 2), dtype=np.float64)
    stack = [(t.root, np.arange(idx.size))]
    while stack:
        node, positions = stack.pop()
        if positions.size == 0:
            continue
        if node.is_leaf:
            probabilities[positions] = node.probabilities
            continue
        goes_left = route_left(node.split, d, idx[positions], prefer_left=node.left.n >= node.right.n)
        stack.append((node.right, positions[~goes_left]))
        stack.append((node.left, positions[goes_left]))
    return probabilities


def classify(probabilities):
    """Class codes from probability pairs; ties go to the small class."""
    probabilities = np.asarray(probabilities)
    return np.where(probabilities[:, SMALL] >= probabilities[:, LARGE], SMALL, LARGE).astype(np.int8)


def predict_rows(t, d, within):
    """Class codes (0 large, 1 small) for the rows ``within``."""
    return classify(predict_proba_rows(t, d, within))


def _check_compatible(t, d):
    if tuple(t.class_levels) != tuple(d.class_levels):
        raise DataError(
            f"Tree class levels {list(t.class_levels)} do not match the data's {list(d.class_levels)}"
        )
    for col in t.columns:
        try:
            other = d.column_schema(col.name)
        except KeyError:
            raise DataError(f"Data lacks predictor column {col.name!r}")
        if other.kind != col.kind:
            raise DataError(f"Column {col.name!r} is {other.kind} in the data but {col.kind} in the tree")
