import numpy as np
import pandas as pd
from django.test import SimpleTestCase, override_settings

from core.exceptions import ConfigError, EmptyResultError, ScoringError
from ctree.builder import grow_tree, predict, predict_rows
from ctree.types import Node, Split, Tree, TreeParams, VariableTest
from dataset.generator import CLASS_COLUMN, CorpusCounts, generate_corpus
from dataset.loaders import dataset_from_frame
from dataset.types import CATEGORICAL, NUMERIC, ColumnSchema
from sampling.seeds import SeedStream
from .ensemble import ensemble_predict, ensemble_predict_rows, ensemble_proba
from .inner import prindt_inner, run_inner_loop, top_k
from .interpretability import check_interpretable, find_forbidden_path, validate_forbidden
from .metrics import balanced_accuracy
from .types import (
    RELATION_GT, RELATION_IN, RELATION_LE, Conjunct, Ensemble, ForbiddenCombination, InnerConfig, Scores, ScoredTree,
)

PREDICTORS = ('PRN_TYPE', 'MLU', 'ETHN_GROUP', 'AGE')


def separable_dataset(n_large=60, n_small=20):
    x = list(range(1, n_large + n_small + 1))
    frame = pd.DataFrame({
        'class': ['z' if v > n_large else 'r' for v in x],
        'x': [str(v) for v in x],
    })
    return dataset_from_frame(frame, 'class')


def leaf_tree(n_large, n_small):
    return Tree(
        root=Node(node_id=1, depth=0, n_large=n_large, n_small=n_small),
        params=TreeParams(),
        columns=(),
        class_levels=('realized', 'zero'),
    )


def adult_age_tree():
    """MLU in {adult} on the left, then AGE <= 66 on the left again."""
    test = VariableTest('MLU', 50.0, 1e-9, 1e-9)
    leaf = lambda node_id, depth: Node(node_id=node_id, depth=depth, n_large=10, n_small=10)
    age = Node(
        node_id=2, depth=1, n_large=20, n_small=20, test=test,
        split=Split(variable='AGE', kind=NUMERIC, threshold=66.0),
        left=leaf(3, 2), right=leaf(4, 2),
    )
    root = Node(
        node_id=1, depth=0, n_large=30, n_small=30, test=test,
        split=Split(variable='MLU', kind=CATEGORICAL, left_levels=('adult',), right_levels=('2', '3')),
        left=age, right=leaf(5, 1),
    )
    columns = (
        ColumnSchema(name='MLU', kind=CATEGORICAL, levels=('2', '3', 'adult')),
        ColumnSchema(name='AGE', kind=NUMERIC),
        ColumnSchema(name='PRN_TYPE', kind=CATEGORICAL, levels=('refer', 'it_ex')),
    )
    return Tree(root=root, params=TreeParams(), columns=columns, class_levels=('realized', 'zero'))


def combination(*conjuncts):
    return ForbiddenCombination(conjuncts=tuple(conjuncts))


class BalancedAccuracyTests(SimpleTestCase):

    def test_class_accuracies_from_pronoun_study(self):
        truth = np.array([0] * 100 + [1] * 100)
        predictions = np.array([0] * 84 + [1] * 16 + [1] * 31 + [0] * 69)
        scores = balanced_accuracy(predictions, truth)
        self.assertAlmostEqual(scores.acc_large, 0.84)
        self.assertAlmostEqual(scores.acc_small, 0.31)
        self.assertAlmostEqual(scores.ba, 0.575)

    def test_perfect_and_constant_predictions(self):
        truth = np.array([0, 0, 1, 1, 0])
        self.assertEqual(balanced_accuracy(truth, truth).ba, 1.0)
        self.assertEqual(balanced_accuracy(np.zeros(5, dtype=int), truth).ba, 0.5)

    def test_matches_confusion_matrix_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            n = int(rng.integers(2, 201))
            truth = rng.integers(0, 2, size=n)
            truth[0], truth[1] = 0, 1
            predictions = rng.integers(0, 2, size=n)
            correct = {0: 0, 1: 0}
            sizes = {0: 0, 1: 0}
            for p, t in zip(predictions.tolist(), truth.tolist()):
                sizes[t] += 1
                correct[t] += p == t
            acc_large = correct[0] / sizes[0]
            acc_small = correct[1] / sizes[1]
            self.assertEqual(
                tuple(balanced_accuracy(predictions, truth)),
                ((acc_large + acc_small) / 2, acc_large, acc_small),
            )

    def test_truth_missing_a_class(self):
        with self.assertRaises(ScoringError):
            balanced_accuracy([0, 1], [0, 0])

    def test_length_mismatch(self):
        with self.assertRaises(ScoringError):
            balanced_accuracy([0, 1, 1], [0, 1])


class InterpretabilityTests(SimpleTestCase):

    def test_implied_combination_rejects_tree(self):
        forbidden = [combination(
            Conjunct('MLU', RELATION_IN, levels=('adult',)),
            Conjunct('AGE', RELATION_LE, value=100.0),
        )]
        t = adult_age_tree()
        self.assertFalse(check_interpretable(t, forbidden))
        witness = find_forbidden_path(t, forbidden)
        self.assertEqual(witness.node_ids, (1, 2, 3))
        self.assertEqual(witness.conditions, ('MLU in {adult}', 'AGE <= 66'))

    def test_empty_forbidden_list(self):
        self.assertTrue(check_interpretable(adult_age_tree(), []))

    def test_unconstrained_variable_is_not_implied(self):
        forbidden = [combination(Conjunct('PRN_TYPE', RELATION_IN, levels=('it_ex',)))]
        self.assertTrue(check_interpretable(adult_age_tree(), forbidden))

    def test_overlap_is_not_implication(self):
        forbidden = [combination(
            Conjunct('MLU', RELATION_IN, levels=('adult',)),
            Conjunct('AGE', RELATION_LE, value=50.0),
        )]
        self.assertTrue(check_interpretable(adult_age_tree(), forbidden))
        lower = [combination(Conjunct('AGE', RELATION_GT, value=66.0))]
        self.assertFalse(check_interpretable(adult_age_tree(), lower))

    def test_validation(self):
        schema = adult_age_tree().columns
        validate_forbidden([combination(Conjunct('AGE', RELATION_GT, value=3.0))], schema)
        with self.assertRaises(ConfigError):
            validate_forbidden([combination(Conjunct('AGE', RELATION_IN, levels=('1',)))], schema)
        with self.assertRaises(ConfigError):
            validate_forbidden([combination(Conjunct('MLU', RELATION_IN, levels=('teen',)))], schema)
        with self.assertRaises(ConfigError):
            validate_forbidden([combination(Conjunct('nope', RELATION_LE, value=1.0))], schema)


@override_settings(NESPRINDT_PARALLEL_BACKEND='threading')
class InnerLoopTests(SimpleTestCase):

    def test_single_repetition_on_separable_data(self):
        d = separable_dataset()
        cfg = InnerConfig(percents=(1.0,), inner_reps=1, tree=TreeParams())
        ranked = prindt_inner(d, d.all_rows(), cfg, SeedStream(0).child('outer', 1))
        self.assertEqual(len(ranked), 1)
        self.assertEqual(ranked[0].ba_outer, 1.0)
        self.assertEqual(ranked[0].tree_id, 'o1-i1-p1')

    def test_ranking_determinism_and_thread_independence(self):
        frame = generate_corpus(CorpusCounts(900, 100, 1800, 200), seed=6)
        d = dataset_from_frame(frame, CLASS_COLUMN, {'MLU': CATEGORICAL})
        cfg = InnerConfig(percents=(0.2, 0.4), inner_reps=6, tree=TreeParams(), predictors=PREDICTORS)
        stream = SeedStream(12).child('outer', 2)
        first = prindt_inner(d, d.all_rows(), cfg, stream, outer_index=2)
        second = prindt_inner(d, d.all_rows(), cfg, stream, outer_index=2)
        threaded = prindt_inner(d, d.all_rows(), cfg, stream, outer_index=2, threads=3)
        describe = lambda ranked: [(item.tree_id, item.outer_scores, item.tree.signature()) for item in ranked]
        self.assertEqual(len(first), 12)
        self.assertEqual(describe(first), describe(second))
        self.assertEqual(describe(first), describe(threaded))
        keys = [item.rank_key() for item in first]
        self.assertEqual(keys, sorted(keys))

    def test_all_trees_filtered(self):
        d = separable_dataset()
        cfg = InnerConfig(
            percents=(1.0,), inner_reps=2, tree=TreeParams(),
            forbidden=(combination(Conjunct('x', RELATION_LE, value=1000.0)),),
        )
        with self.assertRaisesRegex(EmptyResultError, 'Outer repetition 4'):
            run_inner_loop(d, d.all_rows(), cfg, SeedStream(0), outer_index=4)

    def test_unimplied_filter_keeps_trees(self):
        d = separable_dataset()
        cfg = InnerConfig(
            percents=(1.0,), inner_reps=2, tree=TreeParams(),
            forbidden=(combination(Conjunct('x', RELATION_GT, value=1000.0)),),
        )
        result = run_inner_loop(d, d.all_rows(), cfg, SeedStream(0))
        self.assertEqual((result.fitted, result.filtered), (2, 0))


class TopKTests(SimpleTestCase):

    def scored(self, inner, ba):
        return ScoredTree(
            tree=None, outer=1, inner=inner, percent_index=1, percent=0.06,
            outer_scores=Scores(ba, ba, ba),
        )

    def test_truncation_and_order(self):
        trees = [self.scored(1, 0.6), self.scored(2, 0.7), self.scored(3, 0.7), self.scored(4, 0.5)]
        best = top_k(trees, 3)
        self.assertEqual([item.inner for item in best], [2, 3, 1])
        self.assertEqual([item.inner for item in top_k(trees[:2], 3)], [2, 1])
        self.assertEqual(top_k(trees, 1)[0].inner, 2)

    def test_prefix_of_full_sort(self):
        rng = np.random.default_rng(1)
        trees = [self.scored(j, float(rng.integers(0, 5)) / 4) for j in range(1, 40)]
        full = sorted(trees, key=ScoredTree.rank_key)
        self.assertEqual(top_k(trees, 5), full[:5])
        better = self.scored(99, 2.0)
        displaced = top_k(trees + [better], 5)
        self.assertEqual(displaced[0], better)
        self.assertEqual(displaced[1:], full[:4])

    def test_k_must_be_positive(self):
        with self.assertRaises(ValueError):
            top_k([], 0)


class EnsembleTests(SimpleTestCase):

    def test_probability_averaging(self):
        e = Ensemble(members=(leaf_tree(6, 4), leaf_tree(6, 4), leaf_tree(1, 9)))
        p_large, p_small = ensemble_proba(e, {})
        self.assertAlmostEqual(p_large, 1.3 / 3)
        self.assertAlmostEqual(p_small, 1.7 / 3)
        self.assertEqual(ensemble_predict(e, {}), 'zero')

    def test_tie_goes_to_small_class(self):
        e = Ensemble(members=(leaf_tree(8, 2), leaf_tree(2, 8)))
        self.assertEqual(ensemble_predict(e, {}), 'zero')

    def test_copies_of_one_tree_predict_like_the_tree(self):
        frame = generate_corpus(CorpusCounts(1500, 200, 7800, 500), seed=9)
        d = dataset_from_frame(frame, CLASS_COLUMN, {'MLU': CATEGORICAL})
        self.assertEqual(d.n_rows, 10000)
        t = grow_tree(d, d.all_rows(), TreeParams(), PREDICTORS)
        np.testing.assert_array_equal(
            ensemble_predict_rows(Ensemble(members=(t, t, t)), d, d.all_rows()),
            predict_rows(t, d, d.all_rows()),
        )
        single = Ensemble(members=(t,))
        for row in range(0, d.n_rows, 97):
            record = d.record(row)
            self.assertEqual(ensemble_predict(single, record), predict(t, record)[0])

    def test_empty_ensemble_rejected(self):
        with self.assertRaises(ValueError):
            Ensemble(members=())
