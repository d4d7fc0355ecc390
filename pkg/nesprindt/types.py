"""
Results of a nested undersampling run and of the heterogeneity probe.
"""
from dataclasses import dataclass, field
from typing import Optional

from prindt.types import Scores

BY_OUTER = 'by_outer'
BY_FULL = 'by_full'
CRITERIA = (BY_OUTER, BY_FULL)


@dataclass(frozen=True)
class OuterResult:
    """One outer repetition: its undersample, ranked trees and kept top-k."""
    outer: int
    seed_path: str
    under_out: object
    ranked: tuple
    top: tuple
    fitted: int
    filtered: int
    minority_share: float


@dataclass(frozen=True)
class EnsembleResult:
    strategy: str
    outer: Optional[int]
    member_ids: tuple
    ensemble: object
    scores: Scores
    full_scores: Scores
    scored_on: str

    def to_dict(self):
        return {
            'strategy': self.strategy,
            'outer': self.outer,
            'members': list(self.member_ids),
            'scored_on': self.scored_on,
            'scores': self.scores.to_dict(),
            'full_scores': self.full_scores.to_dict(),
        }


@dataclass(frozen=True)
class ProbeResult:
    """
    One ordered part of the nesting column's large level, trained together
    with all rows of the small level and scored in-sample.
    """
    part: int
    start: int
    stop: int
    first_row: int
    last_row: int
    part_size: int
    train_size: int
    small_share: float
    scores: Scores
    single_class: bool = False
    tree: object = None

    @property
    def ba(self):
        return self.scores.ba

    def to_dict(self):
        return {
            'part': self.part,
            'start': self.start,
            'stop': self.stop,
            'first_row': self.first_row,
            'last_row': self.last_row,
            'part_size': self.part_size,
            'train_size': self.train_size,
            'small_share': self.small_share,
            'single_class': self.single_class,
            **self.scores.to_dict(),
        }


@dataclass(frozen=True)
class NesReport:
    config: object
    dataset: dict
    predictors: tuple
    outer: tuple
    kept: tuple
    best_by_outer: object
    best_by_full: object
    strategy_a: tuple
    strategy_a_best: EnsembleResult
    strategy_b: EnsembleResult
    full_minority_share: float
    probe: Optional[tuple] = None
    summaries: dict = field(default_factory=dict)

    @property
    def scored_trees(self):
        """Every scored tree, in (outer, inner, percent) order."""
        trees = [item for result in self.outer for item in result.ranked]
        return sorted(trees, key=lambda item: item.position)

    @property
    def same_best(self):
        return self.best_by_outer.tree_id == self.best_by_full.tree_id

    def find_tree(self, tree_id):
        for item in self.kept:
            if item.tree_id == tree_id:
                return item
        return None
