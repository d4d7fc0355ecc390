import math

import numpy as np
import pandas as pd
from django.test import SimpleTestCase

from core.exceptions import DataError, SamplingError
from dataset.generator import ADULT, CHILD, CLASS_COLUMN, NESTING_COLUMN, generate_corpus
from dataset.loaders import dataset_from_frame
from dataset.services import class_counts, rows_with_level
from dataset.types import CATEGORICAL, SMALL, RowIndexSet
from .seeds import SeedStream
from .services import partition_in_order, undersample_class, undersample_level, undersample_size
from .types import UndersampleSpec


def toy_dataset(n_large=20, n_small=5, speaker_small=None):
    classes = ['r'] * n_large + ['z'] * n_small
    frame = pd.DataFrame({'class': classes, 'x': [str(i) for i in range(len(classes))]})
    if speaker_small is not None:
        frame['SPEAKER'] = ['child' if i < speaker_small else 'adult' for i in range(len(classes))]
    return dataset_from_frame(frame, 'class')


class SeedStreamTests(SimpleTestCase):

    def test_same_path_same_sequence(self):
        a = SeedStream(42).child('outer', 3).child('inner', 7).generator().random(5)
        b = SeedStream(42).child('outer', 3).child('inner', 7).generator().random(5)
        np.testing.assert_array_equal(a, b)

    def test_distinct_paths_differ(self):
        a = SeedStream(42).child('outer', 1).generator().random(5)
        b = SeedStream(42).child('outer', 2).generator().random(5)
        c = SeedStream(42).child('probe', 1).generator().random(5)
        self.assertFalse(np.array_equal(a, b))
        self.assertFalse(np.array_equal(a, c))

    def test_rejects_out_of_range_seed(self):
        with self.assertRaises(ValueError):
            SeedStream(-1)
        with self.assertRaises(ValueError):
            SeedStream(2 ** 64)

    def test_describe(self):
        self.assertEqual(SeedStream(7).child('outer', 2).child('inner', 5).describe(), '7/outer:2/inner:5')


class ReferenceShapeTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        frame = generate_corpus(seed=11)
        cls.d = dataset_from_frame(frame, CLASS_COLUMN, {'MLU': CATEGORICAL})
        cls.child = rows_with_level(cls.d, NESTING_COLUMN, CHILD)
        cls.adult = rows_with_level(cls.d, NESTING_COLUMN, ADULT)

    def test_class_undersample_of_full_data(self):
        under = undersample_class(self.d, self.d.all_rows(), UndersampleSpec(0.06), SeedStream(1))
        self.assertEqual(class_counts(self.d, under), (1166, 1108))
        self.assertEqual(undersample_size(0.06, 19442), 1166)

    def test_level_undersample_matches_child_size(self):
        under = undersample_level(self.d, NESTING_COLUMN, CHILD, SeedStream(1).child('outer', 1))
        self.assertEqual(len(under), 6450)
        self.assertTrue(self.child.issubset(under))
        self.assertEqual(len(np.intersect1d(under.indices, self.adult.indices)), 3225)

    def test_ten_outer_draws_are_distinct_and_keep_children(self):
        draws = [
            undersample_level(self.d, NESTING_COLUMN, CHILD, SeedStream(5).child('outer', i))
            for i in range(1, 11)
        ]
        self.assertEqual(len({draw.digest() for draw in draws}), 10)
        for draw in draws:
            self.assertTrue(self.child.issubset(draw))

    def test_adult_partition_sizes(self):
        parts = partition_in_order(self.d, self.adult, 8)
        self.assertEqual([len(part) for part in parts], [2166] * 5 + [2165] * 3)
        np.testing.assert_array_equal(np.concatenate([part.indices for part in parts]), self.adult.indices)


class UndersampleClassTests(SimpleTestCase):

    def setUp(self):
        self.d = toy_dataset()

    def test_keeps_every_small_row(self):
        for repetition in range(1, 30):
            under = undersample_class(
                self.d, self.d.all_rows(), UndersampleSpec(0.3), SeedStream(9).child('inner', repetition),
            )
            small_rows = np.flatnonzero(self.d.y == SMALL)
            self.assertTrue(np.isin(small_rows, under.indices).all())
            self.assertEqual(class_counts(self.d, under), (6, 5))
            self.assertTrue(np.all(np.diff(under.indices) > 0))

    def test_minority_preserved_within_subset(self):
        rng = np.random.default_rng(4)
        for seed in range(20):
            rows = np.sort(rng.choice(self.d.n_rows, size=15, replace=False))
            within = RowIndexSet(rows)
            large, small = class_counts(self.d, within)
            if large == 0 or small == 0 or math.floor(0.5 * large) == 0:
                continue
            under = undersample_class(self.d, within, UndersampleSpec(0.5), SeedStream(seed))
            self.assertTrue(under.issubset(within))
            within_small = rows[self.d.y[rows] == SMALL]
            self.assertTrue(np.isin(within_small, under.indices).all())

    def test_full_percent_is_identity(self):
        under = undersample_class(self.d, self.d.all_rows(), UndersampleSpec(1.0), SeedStream(0))
        self.assertEqual(under, self.d.all_rows())

    def test_same_stream_same_rows(self):
        stream = SeedStream(3).child('outer', 1).child('inner', 2)
        a = undersample_class(self.d, self.d.all_rows(), UndersampleSpec(0.5), stream)
        b = undersample_class(self.d, self.d.all_rows(), UndersampleSpec(0.5), stream)
        self.assertEqual(a, b)

    def test_zero_large_rows_rejected(self):
        with self.assertRaises(SamplingError):
            undersample_class(self.d, self.d.all_rows(), UndersampleSpec(0.01), SeedStream(0))

    def test_one_class_input_rejected(self):
        with self.assertRaises(SamplingError):
            undersample_class(self.d, RowIndexSet(range(20)), UndersampleSpec(0.5), SeedStream(0))

    def test_inclusion_frequency(self):
        reps = 2000
        hits = np.zeros(self.d.n_rows)
        for j in range(reps):
            under = undersample_class(self.d, self.d.all_rows(), UndersampleSpec(0.3), SeedStream(1).child('inner', j))
            hits[under.indices] += 1
        frequency = hits[self.d.y == 0] / reps
        standard_error = math.sqrt(0.3 * 0.7 / reps)
        self.assertTrue(np.all(np.abs(frequency - 0.3) <= 4 * standard_error))

    def test_invalid_percent(self):
        with self.assertRaises(ValueError):
            UndersampleSpec(0.0)
        with self.assertRaises(ValueError):
            UndersampleSpec(1.5)


class UndersampleLevelTests(SimpleTestCase):

    def test_equal_levels(self):
        d = toy_dataset(n_large=10, n_small=10, speaker_small=10)
        under = undersample_level(d, 'SPEAKER', 'child', SeedStream(0))
        self.assertEqual(under, d.all_rows())

    def test_large_level_smaller_than_small_level(self):
        d = toy_dataset(n_large=10, n_small=10, speaker_small=15)
        with self.assertRaises(SamplingError):
            undersample_level(d, 'SPEAKER', 'child', SeedStream(0))

    def test_misconfigured_nesting(self):
        d = toy_dataset(speaker_small=5)
        with self.assertRaises(DataError):
            undersample_level(d, 'SPEAKER', 'teen', SeedStream(0))
        with self.assertRaises(DataError):
            undersample_level(d, 'x', '1', SeedStream(0))
        with self.assertRaises(DataError):
            undersample_level(d, 'missing', 'child', SeedStream(0))


class PartitionTests(SimpleTestCase):

    def setUp(self):
        self.d = toy_dataset(n_large=3, n_small=2)

    def test_two_parts_of_five_rows(self):
        parts = partition_in_order(self.d, self.d.all_rows(), 2)
        self.assertEqual([list(part) for part in parts], [[0, 1, 2], [3, 4]])

    def test_singleton_parts(self):
        parts = partition_in_order(self.d, self.d.all_rows(), 5)
        self.assertEqual([list(part) for part in parts], [[0], [1], [2], [3], [4]])

    def test_too_many_or_too_few_parts(self):
        with self.assertRaises(SamplingError):
            partition_in_order(self.d, self.d.all_rows(), 6)
        with self.assertRaises(SamplingError):
            partition_in_order(self.d, self.d.all_rows(), 1)
