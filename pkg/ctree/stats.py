"""
Per-variable independence tests against the binary class.

* categorical predictor: Pearson chi-square on the level x class table
  (levels without rows dropped), p from the chi-square tail; nodes with at
  most EXACT_CHI2_MAX_N rows use the exact conditional distribution of the
  statistic given both margins instead.
* numeric predictor: two-sample rank-sum with mid-ranks, p from the normal
  approximation with tie correction; when both class sizes are at most
  EXACT_RANKSUM_MAX_N the exact permutation distribution of the rank sum
  (ties included) is enumerated instead. The reported statistic is the
  squared standardized rank sum, which puts both tests on a chi-square(1)
  scale for tie-breaking.

Bonferroni adjustment multiplies by the number m of predictors that are not
constant in the node.
"""
import logging
import math

import numpy as np
from django.conf import settings
from scipy.stats import chi2_contingency, norm, rankdata

from dataset.types import SMALL
from .types import VariableTest

logger = logging.getLogger(__name__)

EXACT_CHI2_MAX_N = getattr(settings, 'NESPRINDT_EXACT_CHI2_MAX_N', 16)
EXACT_RANKSUM_MAX_N = getattr(settings, 'NESPRINDT_EXACT_RANKSUM_MAX_N', 12)

# Relative slack when comparing a permuted statistic with the observed one.
STAT_TOLERANCE = 1e-9


def independence_test(d, within, variable, predictors=None):
    """
    Test one predictor against the class on the rows ``within``.

    m for the Bonferroni adjustment counts the non-constant variables among
    ``predictors`` (all predictors of ``d`` by default).
    """
    predictors = tuple(predictors or d.predictor_names)
    if variable not in predictors:
        predictors = predictors + (variable,)
    tests = test_variables(d, d.check_indices(within), predictors)
    return next(test for test in tests if test.variable == variable)


def test_variables(d, idx, predictors):
    """Raw tests for every predictor on the rows ``idx``, then Bonferroni adjustment."""
    y = d.y[idx]
    raw = []
    for name in predictors:
        col = d.column_schema(name)
        values = d.column(name)[idx]
        if col.is_categorical:
            raw.append((name,) + categorical_test(values, y))
        else:
            raw.append((name,) + rank_sum_test(values, y))
    m = sum(1 for _, _, _, tested in raw if tested)
    return [
        VariableTest(
            variable=name,
            statistic=statistic,
            p_raw=p_raw,
            p_adjusted=min(1.0, m * p_raw) if tested else 1.0,
            tested=tested,
        )
        for name, statistic, p_raw, tested in raw
    ]


def categorical_test(codes, y):
    """Return (statistic, p_raw, tested) for a categorical predictor."""
    table = contingency_table(codes, y)
    if table.shape[0] < 2:
        return 0.0, 1.0, False
    if (table.sum(axis=0) == 0).any():
        return 0.0, 1.0, True
    n = int(table.sum())
    if n <= EXACT_CHI2_MAX_N:
        statistic = pearson_chi2(table)
        return statistic, exact_chi2_pvalue(table), True
    statistic, p_value, _, _ = chi2_contingency(table, correction=False)
    return float(statistic), float(p_value), True


def rank_sum_test(values, y):
    """Return (statistic, p_raw, tested) for a numeric predictor."""
    values = np.asarray(values, dtype=float)
    if values.size == 0 or np.all(values == values[0]):
        return 0.0, 1.0, False
    is_small = np.asarray(y) == SMALL
    n1 = int(is_small.sum())
    n2 = int(values.size - n1)
    if n1 == 0 or n2 == 0:
        return 0.0, 1.0, True

    n = n1 + n2
    ranks = rankdata(values)
    rank_sum = float(ranks[is_small].sum())
    expected = n1 * (n + 1) / 2.0
    _, tie_sizes = np.unique(values, return_counts=True)
    tie_term = float(np.sum(tie_sizes.astype(float) ** 3 - tie_sizes))
    variance = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    z = (rank_sum - expected) / math.sqrt(variance)
    statistic = z * z

    if n1 <= EXACT_RANKSUM_MAX_N and n2 <= EXACT_RANKSUM_MAX_N:
        return statistic, exact_rank_sum_pvalue(ranks, is_small), True
    return statistic, float(min(1.0, 2.0 * norm.sf(abs(z)))), True


def contingency_table(codes, y):
    """Level x (large, small) counts for the levels present."""
    codes = np.asarray(codes)
    y = np.asarray(y)
    observed = np.unique(codes)
    lookup = np.searchsorted(observed, codes)
    table = np.zeros((observed.size, 2), dtype=np.int64)
    np.add.at(table, (lookup, y.astype(np.int64)), 1)
    return table


def pearson_chi2(table):
    table = np.asarray(table, dtype=float)
    n = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(expected > 0, (table - expected) ** 2 / expected, 0.0)
    return float(terms.sum())


def exact_chi2_pvalue(table):
    """
    P(chi-square >= observed) under the permutation null: class labels
    shuffled over the rows with both margins fixed, enumerated exactly.
    """
    table = np.asarray(table, dtype=np.int64)
    row_totals = table.sum(axis=1)
    n_small = int(table[:, 1].sum())
    n = int(row_totals.sum())
    observed = pearson_chi2(table)
    threshold = observed - STAT_TOLERANCE * max(1.0, observed)

    denominator = math.comb(n, n_small)
    tail = 0
    for smalls in _small_allocations(row_totals.tolist(), n_small):
        candidate = np.column_stack([row_totals - smalls, smalls])
        if pearson_chi2(candidate) >= threshold:
            weight = 1
            for total, s in zip(row_totals.tolist(), smalls):
                weight *= math.comb(total, s)
            tail += weight
    return tail / denominator


def _small_allocations(row_totals, n_small):
    """Every way of spreading n_small small-class rows over rows of the given sizes."""
    if not row_totals:
        if n_small == 0:
            yield []
        return
    head, rest = row_totals[0], row_totals[1:]
    capacity = sum(rest)
    for s in range(max(0, n_small - capacity), min(head, n_small) + 1):
        for tail in _small_allocations(rest, n_small - s):
            yield [s] + tail


def exact_rank_sum_pvalue(ranks, is_small):
    """
    Two-sided exact p of the small-class rank sum over all label
    permutations, counting subsets by doubled (integer) mid-rank sums.
    """
    doubled = np.rint(2 * np.asarray(ranks, dtype=float)).astype(np.int64)
    n = doubled.size
    n1 = int(np.sum(is_small))
    max_sum = int(doubled.sum())

    counts = np.zeros((n1 + 1, max_sum + 1), dtype=np.float64)
    counts[0, 0] = 1.0
    for i, v in enumerate(doubled.tolist()):
        for k in range(min(i + 1, n1), 0, -1):
            counts[k, v:] += counts[k - 1, :max_sum + 1 - v]

    centre = n1 * (n + 1)  # doubled expected rank sum
    observed = abs(int(doubled[np.asarray(is_small)].sum()) - centre)
    sums = np.arange(max_sum + 1)
    extreme = np.abs(sums - centre) >= observed
    return float(counts[n1, extreme].sum() / math.comb(n, n1))
