"""
Typed tabular data model.

A Dataset stores one numpy array per column: categorical columns hold
integer codes into their level tuple, numeric columns hold float64 values.
The class column is additionally kept as ``y`` with 0 = large class and
1 = small class. All arrays are read-only after construction.
"""
import hashlib
from dataclasses import dataclass, field

import numpy as np

CATEGORICAL = 'categorical'
NUMERIC = 'numeric'
COLUMN_KINDS = (CATEGORICAL, NUMERIC)

LARGE = 0
SMALL = 1


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str
    levels: tuple = ()

    def __post_init__(self):
        if self.kind not in COLUMN_KINDS:
            raise ValueError(f"Column {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == NUMERIC and self.levels:
            raise ValueError(f"Numeric column {self.name!r} cannot carry levels")
        if self.kind == CATEGORICAL:
            if any(not level for level in self.levels):
                raise ValueError(f"Column {self.name!r} has an empty level name")
            if len(set(self.levels)) != len(self.levels):
                raise ValueError(f"Column {self.name!r} has duplicate level names")

    @property
    def is_categorical(self):
        return self.kind == CATEGORICAL

    def level_code(self, level):
        try:
            return self.levels.index(level)
        except ValueError:
            return None


class RowIndexSet:
    """Ordered, duplicate-free row positions into a Dataset."""

    __slots__ = ('_indices',)

    def __init__(self, indices):
        arr = np.asarray(indices, dtype=np.int64).reshape(-1)
        if arr.size and np.unique(arr).size != arr.size:
            raise ValueError("RowIndexSet indices must be duplicate-free")
        arr = arr.copy()
        arr.setflags(write=False)
        self._indices = arr

    @classmethod
    def all(cls, n_rows):
        return cls(np.arange(n_rows, dtype=np.int64))

    @property
    def indices(self):
        return self._indices

    def __len__(self):
        return int(self._indices.size)

    def __iter__(self):
        return iter(self._indices.tolist())

    def __contains__(self, row):
        return bool(np.any(self._indices == row))

    def __eq__(self, other):
        if not isinstance(other, RowIndexSet):
            return NotImplemented
        return np.array_equal(self._indices, other._indices)

    def __hash__(self):
        return hash(self._indices.tobytes())

    def __repr__(self):
        return f"RowIndexSet(n={len(self)})"

    def issubset(self, other):
        return bool(np.isin(self._indices, other.indices).all())

    def union(self, other):
        """Union in ascending row order."""
        return RowIndexSet(np.union1d(self._indices, other.indices))

    def digest(self):
        """SHA-256 of the little-endian int64 row positions."""
        return hashlib.sha256(self._indices.astype('<i8').tobytes()).hexdigest()


@dataclass(frozen=True, eq=False)
class Dataset:
    schema: tuple
    class_column: str
    class_levels: tuple  # (large, small)
    columns: dict = field(repr=False)
    y: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.class_levels) != 2:
            raise ValueError("A dataset needs exactly two class levels")
        for arr in list(self.columns.values()) + [self.y]:
            arr.setflags(write=False)

    @property
    def n_rows(self):
        return int(self.y.size)

    @property
    def column_names(self):
        return tuple(col.name for col in self.schema)

    @property
    def predictor_names(self):
        return tuple(col.name for col in self.schema if col.name != self.class_column)

    @property
    def large_level(self):
        return self.class_levels[LARGE]

    @property
    def small_level(self):
        return self.class_levels[SMALL]

    def column_schema(self, name):
        for col in self.schema:
            if col.name == name:
                return col
        raise KeyError(name)

    def column(self, name):
        return self.columns[name]

    def all_rows(self):
        return RowIndexSet.all(self.n_rows)

    def check_indices(self, within):
        idx = within.indices
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_rows):
            raise IndexError(f"Row index out of range for a dataset of {self.n_rows} rows")
        return idx

    def value(self, row, name):
        col = self.column_schema(name)
        raw = self.columns[name][row]
        if col.is_categorical:
            return col.levels[int(raw)]
        return float(raw)

    def record(self, row):
        """One row as a {column: value} mapping with level names decoded."""
        return {name: self.value(row, name) for name in self.column_names}

    def class_label(self, code):
        return self.class_levels[int(code)]
