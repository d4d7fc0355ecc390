import itertools
import math

import numpy as np
import pandas as pd
from django.test import SimpleTestCase
from scipy.stats import chi2, rankdata

from dataset.generator import CLASS_COLUMN, CorpusCounts, generate_corpus
from dataset.loaders import dataset_from_frame
from dataset.types import CATEGORICAL, NUMERIC, RowIndexSet
from .builder import grow_tree, predict, predict_rows
from .rendering import render_tree, tree_from_dict, tree_to_dict
from .splits import find_split, select_split_variable
from .stats import contingency_table, exact_chi2_pvalue, independence_test, pearson_chi2, rank_sum_test
from .types import Node, Split, Tree, TreeParams, VariableTest, format_threshold

GENERATOR_PREDICTORS = ('PRN_TYPE', 'MLU', 'ETHN_GROUP', 'AGE')


def frame_dataset(columns, classes, hint=None):
    frame = pd.DataFrame({'class': classes, **{name: [str(v) for v in values] for name, values in columns.items()}})
    return dataset_from_frame(frame, 'class', hint)


def separable_dataset():
    x = list(range(1, 41))
    classes = ['z' if v > 30 else 'r' for v in x]
    noise = ['p' if v % 2 else 'q' for v in x]
    return frame_dataset({'x': x, 'noise': noise}, classes)


def leaf_tree(n_large, n_small):
    return Tree(
        root=Node(node_id=1, depth=0, n_large=n_large, n_small=n_small),
        params=TreeParams(),
        columns=(),
        class_levels=('realized', 'zero'),
    )


def condition_paths(t):
    """Set of root-to-node condition tuples."""
    paths = set()

    def visit(node, path):
        paths.add(path)
        if not node.is_leaf:
            visit(node.left, path + (node.split.describe('left'),))
            visit(node.right, path + (node.split.describe('right'),))

    visit(t.root, ())
    return paths


class IndependenceTestTests(SimpleTestCase):

    def test_perfect_two_by_two(self):
        d = frame_dataset({'g': ['a'] * 10 + ['b'] * 10}, ['r'] * 10 + ['z'] * 10)
        test = independence_test(d, d.all_rows(), 'g')
        self.assertAlmostEqual(test.statistic, 20.0)
        self.assertAlmostEqual(test.p_raw, chi2.sf(20.0, 1), places=12)
        self.assertAlmostEqual(test.p_raw, 7.7e-6, delta=1e-7)
        self.assertEqual(test.p_adjusted, test.p_raw)

    def test_zero_statistic_gives_p_one(self):
        d = frame_dataset({'g': ['a', 'b'] * 10}, ['r'] * 10 + ['z'] * 10)
        test = independence_test(d, d.all_rows(), 'g')
        self.assertAlmostEqual(test.statistic, 0.0)
        self.assertAlmostEqual(test.p_raw, 1.0)

    def test_perfectly_ordered_numeric_twelve_per_class(self):
        x = list(range(1, 25))
        d = frame_dataset({'x': x}, ['r' if v <= 12 else 'z' for v in x])
        test = independence_test(d, d.all_rows(), 'x')
        self.assertLess(test.p_raw, 1e-4)
        self.assertAlmostEqual(test.p_raw, 2 / math.comb(24, 12), places=15)

    def test_constant_variable_is_excluded_from_bonferroni(self):
        d = frame_dataset(
            {'g': ['a'] * 10 + ['b'] * 10, 'h': ['c', 'd'] * 10, 'k': ['same'] * 20},
            ['r'] * 10 + ['z'] * 10,
        )
        g = independence_test(d, d.all_rows(), 'g')
        k = independence_test(d, d.all_rows(), 'k')
        self.assertFalse(k.tested)
        self.assertEqual(k.p_raw, 1.0)
        self.assertAlmostEqual(g.p_adjusted, min(1.0, 2 * g.p_raw))

    def test_exact_chi2_matches_label_permutations(self):
        rng = np.random.default_rng(8)
        for n in (8, 11, 14, 16):
            codes = rng.integers(0, 3, size=n)
            y = np.zeros(n, dtype=np.int8)
            y[rng.choice(n, size=n // 3, replace=False)] = 1
            table = contingency_table(codes, y)
            if table.shape[0] < 2:
                continue
            observed = pearson_chi2(table)
            hits = total = 0
            for small in itertools.combinations(range(n), int(y.sum())):
                labels = np.zeros(n, dtype=np.int8)
                labels[list(small)] = 1
                total += 1
                hits += pearson_chi2(contingency_table(codes, labels)) >= observed - 1e-9 * max(1.0, observed)
            self.assertLessEqual(abs(exact_chi2_pvalue(table) - hits / total), 0.02)
            self.assertAlmostEqual(exact_chi2_pvalue(table), hits / total, places=12)

    def test_exact_rank_sum_matches_enumeration(self):
        values = np.array([1, 2, 2, 3, 4, 4, 4, 5, 6, 7, 7], dtype=float)
        is_small = np.array([0, 1, 0, 1, 0, 0, 1, 1, 0, 1, 0], dtype=np.int8)
        _, p_value, tested = rank_sum_test(values, is_small)
        self.assertTrue(tested)

        ranks = rankdata(values)
        n, n1 = values.size, int(is_small.sum())
        centre = n1 * (n + 1) / 2
        observed = abs(ranks[is_small == 1].sum() - centre)
        extreme = total = 0
        for small in itertools.combinations(range(n), n1):
            total += 1
            extreme += abs(ranks[list(small)].sum() - centre) >= observed - 1e-9
        self.assertAlmostEqual(p_value, extreme / total, delta=1e-3)


class SelectSplitVariableTests(SimpleTestCase):

    def test_unique_minimum_under_alpha(self):
        tests = [VariableTest('a', 9.0, 0.001, 0.002), VariableTest('b', 1.0, 0.25, 0.5)]
        self.assertEqual(select_split_variable(tests, 0.01).variable, 'a')

    def test_nothing_significant(self):
        tests = [VariableTest('a', 1.0, 0.02, 0.04), VariableTest('b', 1.0, 0.25, 0.5)]
        self.assertIsNone(select_split_variable(tests, 0.01))

    def test_tie_goes_to_larger_statistic(self):
        tests = [VariableTest('a', 3.2, 0.001, 0.002), VariableTest('b', 8.1, 0.001, 0.002)]
        self.assertEqual(select_split_variable(tests, 0.01).variable, 'b')

    def test_full_tie_goes_to_schema_order(self):
        tests = [VariableTest('a', 8.1, 0.001, 0.002), VariableTest('b', 8.1, 0.001, 0.002)]
        self.assertEqual(select_split_variable(tests, 0.01).variable, 'a')


class FindSplitTests(SimpleTestCase):

    def test_numeric_midpoint(self):
        x = list(range(1, 11))
        d = frame_dataset({'x': x}, ['z' if v >= 6 else 'r' for v in x])
        split = find_split(d, d.all_rows(), 'x', min_leaf=1)
        self.assertEqual(split.threshold, 5.5)

    def test_categorical_subset(self):
        levels = ['a'] * 10 + ['b'] * 10 + ['c'] * 10
        classes = ['z'] * 9 + ['r'] + ['z'] + ['r'] * 9 + ['z'] + ['r'] * 9
        d = frame_dataset({'g': levels}, classes)
        split = find_split(d, d.all_rows(), 'g', min_leaf=1)
        self.assertEqual(split.left_levels, ('a',))
        self.assertEqual(split.right_levels, ('b', 'c'))

    def test_min_leaf_blocks_every_split(self):
        x = list(range(1, 11))
        d = frame_dataset({'x': x}, ['z' if v >= 6 else 'r' for v in x])
        self.assertIsNone(find_split(d, d.all_rows(), 'x', min_leaf=6))

    def test_many_levels_use_prefix_scan(self):
        levels = [f"l{i:02d}" for i in range(14) for _ in range(10)]
        classes = ['z' if int(level[1:]) >= 10 else 'r' for level in levels]
        d = frame_dataset({'g': levels}, classes)
        split = find_split(d, d.all_rows(), 'g', min_leaf=1)
        self.assertEqual(set(split.right_levels), {'l10', 'l11', 'l12', 'l13'})


class GrowTreeTests(SimpleTestCase):

    def test_perfect_numeric_separation(self):
        d = separable_dataset()
        t = grow_tree(d, d.all_rows(), TreeParams())
        self.assertEqual(t.depth, 1)
        self.assertEqual(t.root.split.variable, 'x')
        self.assertEqual(t.root.split.threshold, 30.5)
        self.assertEqual([node.node_id for node in t.nodes()], [1, 2, 3])
        self.assertEqual(predict(t, {'x': 7, 'noise': 'p'})[0], 'r')
        self.assertEqual(predict(t, {'x': 35, 'noise': 'p'})[0], 'z')
        np.testing.assert_array_equal(predict_rows(t, d, d.all_rows()), d.y)

    def test_max_depth_zero_is_a_leaf(self):
        d = separable_dataset()
        self.assertTrue(grow_tree(d, d.all_rows(), TreeParams(max_depth=0)).root.is_leaf)

    def test_significance_gate_and_partition(self):
        frame = generate_corpus(CorpusCounts(900, 100, 1800, 200), seed=3)
        d = dataset_from_frame(frame, CLASS_COLUMN, {'MLU': CATEGORICAL})
        t = grow_tree(d, d.all_rows(), TreeParams(alpha=0.01), GENERATOR_PREDICTORS)
        self.assertGreater(len(t.internal_nodes()), 0)
        for node in t.internal_nodes():
            self.assertLessEqual(node.test.p_adjusted, 0.01)
            self.assertEqual(node.left.n + node.right.n, node.n)
            self.assertGreater(node.left.n, 0)
            self.assertGreater(node.right.n, 0)
        self.assertEqual(sum(leaf.n for leaf in t.root.leaves()), d.n_rows)

        strict = grow_tree(d, d.all_rows(), TreeParams(alpha=1e-6), GENERATOR_PREDICTORS)
        self.assertTrue(condition_paths(strict).issubset(condition_paths(t)))

    def test_every_row_reaches_one_leaf(self):
        frame = generate_corpus(CorpusCounts(450, 50, 900, 100), seed=4)
        d = dataset_from_frame(frame, CLASS_COLUMN, {'MLU': CATEGORICAL})
        t = grow_tree(d, d.all_rows(), TreeParams(), GENERATOR_PREDICTORS)
        leaf_total = sum(leaf.n for leaf in t.root.leaves())
        self.assertEqual(leaf_total, d.n_rows)
        self.assertEqual(len(predict_rows(t, d, d.all_rows())), d.n_rows)

    def test_null_data_rarely_splits_at_root(self):
        rng = np.random.default_rng(2024)
        splits = 0
        runs = 200
        for _ in range(runs):
            n = 500
            columns = {
                'c1': rng.choice(['a', 'b', 'c'], size=n),
                'c2': rng.choice(['u', 'v'], size=n),
                'n1': np.round(rng.normal(size=n), 3),
                'n2': rng.integers(0, 50, size=n),
            }
            classes = np.where(rng.random(n) < 0.2, 'z', 'r')
            d = frame_dataset(columns, classes)
            t = grow_tree(d, d.all_rows(), TreeParams(alpha=0.01, max_depth=1))
            splits += not t.root.is_leaf
        self.assertLessEqual(splits / runs, 0.04 + 3 * math.sqrt(0.04 * 0.96 / runs))

    def test_planted_pronoun_type_is_the_root(self):
        hits = 0
        for seed in range(50):
            frame = generate_corpus(seed=seed)
            d = dataset_from_frame(frame, CLASS_COLUMN, {'MLU': CATEGORICAL})
            t = grow_tree(d, d.all_rows(), TreeParams(max_depth=1), GENERATOR_PREDICTORS)
            hits += (not t.root.is_leaf) and t.root.split.variable == 'PRN_TYPE'
        self.assertGreaterEqual(hits, 45)


class PredictTests(SimpleTestCase):

    def test_majority_leaf(self):
        self.assertEqual(predict(leaf_tree(90, 10), {}), ('realized', (0.9, 0.1)))

    def test_tie_goes_to_small_class(self):
        self.assertEqual(predict(leaf_tree(5, 5), {})[0], 'zero')

    def test_unseen_level_follows_larger_child(self):
        levels = ['a'] * 30 + ['b'] * 15
        classes = ['r'] * 30 + ['z'] * 15
        d = frame_dataset({'g': levels}, classes)
        t = grow_tree(d, d.all_rows(), TreeParams())
        self.assertEqual(t.root.split.left_levels, ('a',))
        self.assertEqual(predict(t, {'g': 'never_seen'})[0], 'r')


class RenderTests(SimpleTestCase):

    def test_single_leaf(self):
        t = leaf_tree(90, 10)
        text = render_tree(t)
        self.assertEqual(len(text.splitlines()), 1)
        self.assertIn('n=100', text)
        self.assertIn('small=0.100', text)

    def test_depth_one_tree(self):
        d = separable_dataset()
        t = grow_tree(d, d.all_rows(), TreeParams())
        lines = render_tree(t).splitlines()
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[0].startswith('[1] root -> split on x'))
        self.assertTrue(lines[1].startswith('  [2] x <= 30.5 -> leaf'))
        self.assertTrue(lines[2].startswith('  [3] x > 30.5 -> leaf'))
        self.assertEqual(render_tree(t), render_tree(t))

    def test_serialized_tree_renders_identically(self):
        d = separable_dataset()
        t = grow_tree(d, d.all_rows(), TreeParams())
        restored = tree_from_dict(tree_to_dict(t))
        self.assertEqual(render_tree(restored), render_tree(t))
        self.assertEqual(restored.signature(), t.signature())
        np.testing.assert_array_equal(
            predict_rows(restored, d, RowIndexSet(range(d.n_rows))),
            predict_rows(t, d, d.all_rows()),
        )

    def test_large_thresholds_keep_every_digit(self):
        split = Split(variable='ms', kind=NUMERIC, threshold=1234567.5, statistic=1.0)
        self.assertEqual(split.describe('left'), 'ms <= 1234567.5')
        self.assertEqual(split.describe('right'), 'ms > 1234567.5')
        self.assertEqual(format_threshold(0.1 + 0.2), repr(0.1 + 0.2))
        self.assertEqual(float(format_threshold(2.0 ** 40 + 0.25)), 2.0 ** 40 + 0.25)
        self.assertEqual(format_threshold(66.0), '66')
