"""
Tree data model: variable tests, binary splits, nodes and fitted trees.

All objects are frozen; a fitted Tree can be shared between threads and
processes.
"""
from dataclasses import dataclass
from typing import Optional

from dataset.types import NUMERIC


def format_threshold(value):
    """Shortest text that reads back as the same float; integral values drop the '.0'."""
    value = float(value)
    if value.is_integer() and abs(value) < 2 ** 53:
        return str(int(value))
    return repr(value)


@dataclass(frozen=True)
class TreeParams:
    alpha: float = 0.01
    min_split: int = 20
    min_leaf: int = 7
    max_depth: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.min_split < 2:
            raise ValueError(f"min_split must be >= 2, got {self.min_split}")
        if self.min_leaf < 1:
            raise ValueError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0 or None, got {self.max_depth}")

    def to_dict(self):
        return {
            'alpha': self.alpha,
            'min_split': self.min_split,
            'min_leaf': self.min_leaf,
            'max_depth': self.max_depth,
        }


@dataclass(frozen=True)
class VariableTest:
    variable: str
    statistic: float
    p_raw: float
    p_adjusted: float
    tested: bool = True  # False for variables constant in the node

    def to_dict(self):
        return {
            'variable': self.variable,
            'statistic': self.statistic,
            'p_raw': self.p_raw,
            'p_adjusted': self.p_adjusted,
            'tested': self.tested,
        }


@dataclass(frozen=True)
class Split:
    """
    Binary split. Numeric: left iff value <= threshold. Categorical: left iff
    value in left_levels; right_levels holds the other levels seen while
    fitting, so a level in neither set was unseen at this node.
    """
    variable: str
    kind: str
    threshold: Optional[float] = None
    left_levels: tuple = ()
    right_levels: tuple = ()
    statistic: float = 0.0

    @property
    def is_numeric(self):
        return self.kind == NUMERIC

    def describe(self, side):
        if self.is_numeric:
            op = '<=' if side == 'left' else '>'
            return f"{self.variable} {op} {format_threshold(self.threshold)}"
        levels = self.left_levels if side == 'left' else self.right_levels
        return f"{self.variable} in {{{', '.join(levels)}}}"

    def to_dict(self):
        data = {'variable': self.variable, 'kind': self.kind, 'statistic': self.statistic}
        if self.is_numeric:
            data['threshold'] = self.threshold
        else:
            data['left_levels'] = list(self.left_levels)
            data['right_levels'] = list(self.right_levels)
        return data


@dataclass(frozen=True)
class Node:
    node_id: int
    depth: int
    n_large: int
    n_small: int
    test: Optional[VariableTest] = None
    split: Optional[Split] = None
    left: Optional['Node'] = None
    right: Optional['Node'] = None

    @property
    def is_leaf(self):
        return self.split is None

    @property
    def n(self):
        return self.n_large + self.n_small

    @property
    def probabilities(self):
        """(p_large, p_small) from the training counts."""
        if self.n == 0:
            return (0.5, 0.5)
        return (self.n_large / self.n, self.n_small / self.n)

    @property
    def small_share(self):
        return self.probabilities[1]

    def walk(self):
        """Pre-order traversal."""
        yield self
        if not self.is_leaf:
            yield from self.left.walk()
            yield from self.right.walk()

    def leaves(self):
        return [node for node in self.walk() if node.is_leaf]


@dataclass(frozen=True)
class Tree:
    root: Node
    params: TreeParams
    columns: tuple  # ColumnSchema of every predictor offered to the fit
    class_levels: tuple  # (large, small)

    def column(self, name):
        for col in self.columns:
            if col.name == name:
                return col
        raise KeyError(name)

    @property
    def predictors(self):
        return tuple(col.name for col in self.columns)

    def nodes(self):
        return list(self.root.walk())

    def internal_nodes(self):
        return [node for node in self.root.walk() if not node.is_leaf]

    @property
    def n_leaves(self):
        return len(self.root.leaves())

    @property
    def depth(self):
        return max(node.depth for node in self.root.walk())

    def signature(self):
        """Hashable description of the split structure, used to compare trees."""
        return tuple(
            (node.node_id, node.split.variable, node.split.threshold, node.split.left_levels)
            if not node.is_leaf else (node.node_id, None, None, ())
            for node in self.root.walk()
        )
