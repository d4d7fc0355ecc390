"""
Scored trees, ensembles and forbidden value combinations.
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from ctree.types import TreeParams

RELATION_IN = 'in'
RELATION_LE = 'le'
RELATION_GT = 'gt'
RELATIONS = (RELATION_IN, RELATION_LE, RELATION_GT)


class Scores(NamedTuple):
    ba: float
    acc_large: float
    acc_small: float

    def to_dict(self):
        return {'ba': self.ba, 'acc_large': self.acc_large, 'acc_small': self.acc_small}


@dataclass(frozen=True)
class Conjunct:
    variable: str
    relation: str
    levels: tuple = ()
    value: Optional[float] = None

    def describe(self):
        if self.relation == RELATION_IN:
            return f"{self.variable} in {{{', '.join(self.levels)}}}"
        op = '<=' if self.relation == RELATION_LE else '>'
        return f"{self.variable} {op} {self.value:g}"

    def to_dict(self):
        if self.relation == RELATION_IN:
            return {'variable': self.variable, 'relation': self.relation, 'levels': list(self.levels)}
        return {'variable': self.variable, 'relation': self.relation, 'value': self.value}


@dataclass(frozen=True)
class ForbiddenCombination:
    conjuncts: tuple

    def describe(self):
        return ' and '.join(conjunct.describe() for conjunct in self.conjuncts)

    def to_dict(self):
        return {'conjuncts': [conjunct.to_dict() for conjunct in self.conjuncts]}


@dataclass(frozen=True)
class InnerConfig:
    percents: tuple = (0.06,)
    inner_reps: int = 999
    tree: TreeParams = field(default_factory=TreeParams)
    forbidden: tuple = ()
    predictors: Optional[tuple] = None


@dataclass(frozen=True)
class ScoredTree:
    tree: object
    outer: int
    inner: int
    percent_index: int
    percent: float
    outer_scores: Scores
    full_scores: Optional[Scores] = None

    @property
    def tree_id(self):
        return f"o{self.outer}-i{self.inner}-p{self.percent_index}"

    @property
    def ba_outer(self):
        return self.outer_scores.ba

    @property
    def ba_full(self):
        return None if self.full_scores is None else self.full_scores.ba

    @property
    def position(self):
        return (self.outer, self.inner, self.percent_index)

    def rank_key(self):
        """Sort key: best ba_outer first, earlier repetition on ties."""
        return (-self.ba_outer,) + self.position

    def full_rank_key(self):
        return (-self.ba_full,) + self.position


@dataclass(frozen=True)
class Ensemble:
    """Probability-averaging ensemble; argmax with ties to the small class."""
    members: tuple

    def __post_init__(self):
        if not self.members:
            raise ValueError("An ensemble needs at least one member tree")
