"""
Synthetic corpus shaped like the child/adult subject-pronoun data.

The default counts reproduce the published token counts: children 2,899
realized / 326 zero, adults 16,543 realized / 782 zero. Predictors follow
the variable overview (PRN_TYPE, MLU, ETHN_GROUP, AGE) plus the nesting
column SPEAKER derived from MLU.

Class labels are assigned by drawing exactly the requested number of
small-class rows per speaker group without replacement, with draw weights
that encode the planted effects:

* ``default``: pronoun type dominates (the three ``it`` types are far more
  often zero), with a weaker age effect among MLU-2 children;
* ``none``: class independent of every predictor (small rows drawn
  uniformly over the whole corpus);
* ``heterogeneous``: ``default`` plus one ordered part of the adult rows
  holding a concentrated, strongly pronoun-driven share of the adult zeros.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from core.exceptions import ConfigError

logger = logging.getLogger(__name__)

CLASS_COLUMN = 'class'
LARGE_LEVEL = 'realized'
SMALL_LEVEL = 'zero'
NESTING_COLUMN = 'SPEAKER'
CHILD = 'child'
ADULT = 'adult'
ADULT_AGE_MONTHS = 216

PRN_TYPES = ('refer', 'dem', 'it_ex', 'it_ref', 'it_con')
PRN_TYPE_SHARES = (0.55, 0.15, 0.08, 0.14, 0.08)
IT_TYPES = ('it_ex', 'it_ref', 'it_con')

PLANT_MODES = ('default', 'none', 'heterogeneous')

# Zero-pronoun odds multipliers for the default plant.
PRN_TYPE_WEIGHTS = {'refer': 1.0, 'dem': 0.5, 'it_ex': 8.0, 'it_ref': 8.0, 'it_con': 8.0}
OLDER_MLU2_WEIGHT = 2.0
AGE_EFFECT_MONTHS = 66

# Extra weight for adult rows in the signal part of the heterogeneous plant.
SIGNAL_PART_IT_WEIGHT = 60.0
SIGNAL_PART_OTHER_WEIGHT = 1.5


@dataclass(frozen=True)
class CorpusCounts:
    child_large: int = 2899
    child_small: int = 326
    adult_large: int = 16543
    adult_small: int = 782

    @property
    def n_child(self):
        return self.child_large + self.child_small

    @property
    def n_adult(self):
        return self.adult_large + self.adult_small

    @property
    def total(self):
        return self.n_child + self.n_adult

    def validate(self):
        values = (self.child_large, self.child_small, self.adult_large, self.adult_small)
        if any(v < 0 for v in values):
            raise ConfigError(f"Corpus counts must be non-negative, got {values}")
        if self.n_child < 1 or self.n_adult < 1:
            raise ConfigError("Both speaker groups need at least one row")
        if self.child_small + self.adult_small < 1:
            raise ConfigError("The small class needs at least one row")
        if self.child_large + self.adult_large < 1:
            raise ConfigError("The large class needs at least one row")

    def with_minority_rate(self, rate):
        """Same group sizes, small-class count per group = round(rate x group size)."""
        if rate is None:
            return self
        if not 0.0 < rate < 1.0:
            raise ConfigError(f"--minority-rate must lie strictly between 0 and 1, got {rate}")
        child_small = int(round(rate * self.n_child))
        adult_small = int(round(rate * self.n_adult))
        counts = CorpusCounts(
            child_large=self.n_child - child_small,
            child_small=child_small,
            adult_large=self.n_adult - adult_small,
            adult_small=adult_small,
        )
        if counts.child_small + counts.adult_small < 1:
            raise ConfigError(f"--minority-rate {rate} leaves no small-class rows")
        if counts.child_large + counts.adult_large < 1:
            raise ConfigError(f"--minority-rate {rate} leaves no large-class rows")
        return counts


def derive_speaker(frame):
    """Nesting column derived from MLU: adult rows carry MLU == 'adult'."""
    return np.where(frame['MLU'].astype(str) == ADULT, ADULT, CHILD)


def generate_corpus(counts=None, seed=0, plant='default', parts=8, signal_part=5):
    """
    Build a synthetic corpus as a string-valued DataFrame.

    Children come first, then adults; ``parts``/``signal_part`` (1-based)
    refer to the ordered adult block and only matter for the heterogeneous
    plant.
    """
    counts = counts or CorpusCounts()
    counts.validate()
    if plant not in PLANT_MODES:
        raise ConfigError(f"Unknown plant mode {plant!r}; choose from {PLANT_MODES}")
    if plant == 'heterogeneous' and not 1 <= signal_part <= parts:
        raise ConfigError(f"signal_part must lie in 1..{parts}, got {signal_part}")

    rng = np.random.default_rng(seed)
    children = _child_predictors(rng, counts.n_child)
    adults = _adult_predictors(rng, counts.n_adult)
    frame = pd.concat([children, adults], ignore_index=True)
    frame[NESTING_COLUMN] = derive_speaker(frame)

    is_small = np.zeros(len(frame), dtype=bool)
    child_rows = np.arange(counts.n_child)
    adult_rows = np.arange(counts.n_child, counts.total)

    if plant == 'none':
        n_small = counts.child_small + counts.adult_small
        is_small[rng.choice(len(frame), size=n_small, replace=False)] = True
    else:
        weights = _default_weights(frame)
        if plant == 'heterogeneous':
            weights = weights * _signal_part_boost(frame, adult_rows, parts, signal_part)
        is_small[_weighted_draw(rng, child_rows, weights, counts.child_small)] = True
        is_small[_weighted_draw(rng, adult_rows, weights, counts.adult_small)] = True

    frame.insert(0, CLASS_COLUMN, np.where(is_small, SMALL_LEVEL, LARGE_LEVEL))
    logger.info(
        f"Generated {len(frame)} rows (plant={plant}, seed={seed}): "
        f"{LARGE_LEVEL}={int((~is_small).sum())}, {SMALL_LEVEL}={int(is_small.sum())}"
    )
    return frame


def write_corpus(frame, path):
    frame.to_csv(path, index=False, encoding='utf-8')


def _child_predictors(rng, n):
    mlu = rng.choice(['2', '3'], size=n)
    age = np.where(
        mlu == '2',
        rng.integers(36, 91, size=n),
        rng.integers(84, 146, size=n),
    )
    return pd.DataFrame({
        'PRN_TYPE': rng.choice(PRN_TYPES, size=n, p=PRN_TYPE_SHARES),
        'MLU': mlu,
        'ETHN_GROUP': rng.choice(['C', 'I'], size=n, p=[0.6, 0.4]),
        'AGE': age.astype(str),
    })


def _adult_predictors(rng, n):
    return pd.DataFrame({
        'PRN_TYPE': rng.choice(PRN_TYPES, size=n, p=PRN_TYPE_SHARES),
        'MLU': np.full(n, ADULT),
        'ETHN_GROUP': np.full(n, 'n_a'),
        'AGE': np.full(n, str(ADULT_AGE_MONTHS)),
    })


def _default_weights(frame):
    weights = frame['PRN_TYPE'].map(PRN_TYPE_WEIGHTS).to_numpy(dtype=float)
    older_mlu2 = (frame['MLU'] == '2').to_numpy() & (frame['AGE'].astype(int) > AGE_EFFECT_MONTHS).to_numpy()
    weights[older_mlu2] *= OLDER_MLU2_WEIGHT
    return weights


def _signal_part_boost(frame, adult_rows, parts, signal_part):
    boost = np.ones(len(frame))
    part_rows = np.array_split(adult_rows, parts)[signal_part - 1]
    is_it = frame['PRN_TYPE'].isin(IT_TYPES).to_numpy()
    boost[part_rows] = np.where(is_it[part_rows], SIGNAL_PART_IT_WEIGHT, SIGNAL_PART_OTHER_WEIGHT)
    return boost


def _weighted_draw(rng, rows, weights, size):
    if size > len(rows):
        raise ConfigError(f"Cannot draw {size} small-class rows from a group of {len(rows)}")
    if size == 0:
        return np.empty(0, dtype=np.int64)
    w = weights[rows]
    return rng.choice(rows, size=size, replace=False, p=w / w.sum())
