import shutil
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from django.test import SimpleTestCase

from core.exceptions import ConfigError, DataError
from ctree.builder import grow_tree
from ctree.types import TreeParams
from .generator import (
    ADULT, CHILD, CLASS_COLUMN, NESTING_COLUMN, CorpusCounts, derive_speaker, generate_corpus, write_corpus,
)
from .loaders import dataset_from_frame, load_csv
from .services import class_counts, minority_share, rows_with_level
from .types import CATEGORICAL, NUMERIC, ColumnSchema, RowIndexSet


class TempDirMixin:

    def setUp(self):
        super().setUp()
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)
        super().tearDown()

    def write(self, name, text):
        path = self.tmp / name
        path.write_text(text, encoding='utf-8')
        return path


class ColumnSchemaTests(SimpleTestCase):

    def test_levels_must_be_unique_and_non_empty(self):
        with self.assertRaises(ValueError):
            ColumnSchema(name='x', kind=CATEGORICAL, levels=('a', 'a'))
        with self.assertRaises(ValueError):
            ColumnSchema(name='x', kind=CATEGORICAL, levels=('a', ''))

    def test_numeric_column_has_no_levels(self):
        with self.assertRaises(ValueError):
            ColumnSchema(name='x', kind=NUMERIC, levels=('a',))

    def test_level_code(self):
        col = ColumnSchema(name='x', kind=CATEGORICAL, levels=('b', 'a'))
        self.assertEqual(col.level_code('a'), 1)
        self.assertIsNone(col.level_code('z'))


class RowIndexSetTests(SimpleTestCase):

    def test_rejects_duplicates(self):
        with self.assertRaises(ValueError):
            RowIndexSet([1, 2, 2])

    def test_union_is_sorted(self):
        merged = RowIndexSet([5, 1]).union(RowIndexSet([3, 1]))
        self.assertEqual(list(merged), [1, 3, 5])

    def test_digest_depends_on_content(self):
        self.assertEqual(RowIndexSet([1, 2]).digest(), RowIndexSet([1, 2]).digest())
        self.assertNotEqual(RowIndexSet([1, 2]).digest(), RowIndexSet([1, 3]).digest())


class LoadCsvTests(TempDirMixin, SimpleTestCase):

    def test_infers_kinds_and_keeps_first_appearance_order(self):
        path = self.write('d.csv', 'class,PRN_TYPE,AGE\nzero,it_ex,40\nrealized,refer,50\nrealized,it_ex,60\n')
        d = load_csv(path, 'class')
        self.assertEqual(d.column_schema('PRN_TYPE').levels, ('it_ex', 'refer'))
        self.assertEqual(d.column_schema('AGE').kind, NUMERIC)
        self.assertEqual(d.class_levels, ('realized', 'zero'))
        self.assertEqual(list(d.y), [1, 0, 0])
        self.assertEqual(d.record(0), {'class': 'zero', 'PRN_TYPE': 'it_ex', 'AGE': 40.0})

    def test_schema_hint_forces_categorical(self):
        path = self.write('d.csv', 'class,MLU\na,2\nb,3\nb,2\n')
        d = load_csv(path, 'class', {'MLU': CATEGORICAL})
        self.assertEqual(d.column_schema('MLU').levels, ('2', '3'))

    def test_equal_class_counts_make_later_level_small(self):
        path = self.write('d.csv', 'class,x\na,1\nb,2\n')
        self.assertEqual(load_csv(path, 'class').class_levels, ('a', 'b'))

    def test_single_row_is_rejected(self):
        path = self.write('d.csv', 'class,x\na,1\n')
        with self.assertRaisesRegex(DataError, 'exactly two levels'):
            load_csv(path, 'class')

    def test_three_class_levels_rejected(self):
        path = self.write('d.csv', 'class,x\na,1\nb,2\nc,3\n')
        with self.assertRaises(DataError):
            load_csv(path, 'class')

    def test_missing_file(self):
        with self.assertRaisesRegex(DataError, 'not found'):
            load_csv(self.tmp / 'absent.csv', 'class')

    def test_missing_class_column_is_named(self):
        path = self.write('d.csv', 'label,x\na,1\nb,2\n')
        with self.assertRaisesRegex(DataError, "'class'"):
            load_csv(path, 'class')

    def test_ragged_long_row(self):
        path = self.write('d.csv', 'class,x\na,1\nb,2,3\n')
        with self.assertRaises(DataError):
            load_csv(path, 'class')

    def test_short_row_is_a_missing_cell(self):
        path = self.write('d.csv', 'class,x,z\na,1,q\nb,2\n')
        with self.assertRaisesRegex(DataError, 'Missing cell'):
            load_csv(path, 'class')

    def test_empty_cell(self):
        path = self.write('d.csv', 'class,x\na,\nb,2\n')
        with self.assertRaisesRegex(DataError, 'Missing cell'):
            load_csv(path, 'class')

    def test_invalid_utf8(self):
        path = self.tmp / 'd.csv'
        path.write_bytes(b'class,x\nrealized,1\nzero,\xff\xfe2\n')
        with self.assertRaisesRegex(DataError, 'not valid UTF-8'):
            load_csv(path, 'class')

    def test_numeric_parse_failure(self):
        path = self.write('d.csv', 'class,x\na,1\nb,two\n')
        with self.assertRaisesRegex(DataError, 'Numeric parse failure'):
            load_csv(path, 'class', {'x': NUMERIC})

    def test_row_order_is_file_order(self):
        tags = np.random.default_rng(3).permutation(50)
        lines = ['class,tag'] + [f"{'a' if t % 3 else 'b'},{t}" for t in tags]
        d = load_csv(self.write('d.csv', '\n'.join(lines) + '\n'), 'class')
        self.assertEqual(d.column('tag').astype(int).tolist(), tags.tolist())


class ServicesTests(SimpleTestCase):

    def setUp(self):
        frame = pd.DataFrame({
            'class': ['r', 'r', 'z', 'r', 'z', 'r'],
            'SPEAKER': ['child', 'adult', 'child', 'adult', 'adult', 'adult'],
        })
        self.d = dataset_from_frame(frame, 'class')

    def test_class_counts(self):
        self.assertEqual(class_counts(self.d), (4, 2))
        self.assertEqual(class_counts(self.d, RowIndexSet([])), (0, 0))
        self.assertEqual(class_counts(self.d, RowIndexSet([0, 2])), (1, 1))

    def test_class_counts_match_row_scan(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            rows = np.sort(rng.choice(self.d.n_rows, size=rng.integers(0, 7), replace=False))
            scan_small = sum(1 for row in rows if self.d.value(row, 'class') == 'z')
            self.assertEqual(class_counts(self.d, RowIndexSet(rows)), (len(rows) - scan_small, scan_small))

    def test_rows_with_level(self):
        self.assertEqual(list(rows_with_level(self.d, 'SPEAKER', 'child')), [0, 2])
        with self.assertRaises(DataError):
            rows_with_level(self.d, 'SPEAKER', 'teen')
        with self.assertRaises(DataError):
            rows_with_level(self.d, 'nope', 'child')

    def test_minority_share(self):
        self.assertAlmostEqual(minority_share(self.d), 2 / 6)


class GeneratorTests(TempDirMixin, SimpleTestCase):

    def test_default_counts(self):
        frame = generate_corpus(seed=1)
        self.assertEqual(len(frame), 20550)
        path = self.tmp / 'corpus.csv'
        write_corpus(frame, path)
        d = load_csv(path, CLASS_COLUMN, {'MLU': CATEGORICAL})
        self.assertEqual(class_counts(d), (19442, 1108))
        child = rows_with_level(d, NESTING_COLUMN, CHILD)
        adult = rows_with_level(d, NESTING_COLUMN, ADULT)
        self.assertEqual(len(child), 3225)
        self.assertEqual(len(adult), 17325)
        self.assertEqual(class_counts(d, child), (2899, 326))
        self.assertEqual(class_counts(d, adult), (16543, 782))

    def test_children_come_first(self):
        frame = generate_corpus(CorpusCounts(90, 10, 180, 20), seed=2)
        self.assertTrue((frame[NESTING_COLUMN].iloc[:100] == CHILD).all())
        self.assertTrue((frame[NESTING_COLUMN].iloc[100:] == ADULT).all())
        self.assertEqual(list(derive_speaker(frame)), list(frame[NESTING_COLUMN]))

    def test_same_seed_same_corpus(self):
        counts = CorpusCounts(90, 10, 180, 20)
        pd.testing.assert_frame_equal(generate_corpus(counts, seed=5), generate_corpus(counts, seed=5))

    def test_minority_rate(self):
        counts = CorpusCounts(90, 10, 180, 20).with_minority_rate(0.25)
        self.assertEqual((counts.child_small, counts.adult_small), (25, 50))
        with self.assertRaises(ConfigError):
            CorpusCounts().with_minority_rate(0)
        with self.assertRaises(ConfigError):
            CorpusCounts().with_minority_rate(1.0)

    def test_invalid_counts_and_plant(self):
        with self.assertRaises(ConfigError):
            generate_corpus(CorpusCounts(10, -1, 10, 1))
        with self.assertRaises(ConfigError):
            generate_corpus(CorpusCounts(10, 0, 10, 0))
        with self.assertRaises(ConfigError):
            generate_corpus(plant='strong')

    def test_null_plant_gives_single_leaf(self):
        single_leaf = 0
        for seed in range(5):
            frame = generate_corpus(seed=seed, plant='none')
            d = dataset_from_frame(frame, CLASS_COLUMN, {'MLU': CATEGORICAL})
            self.assertEqual(class_counts(d), (19442, 1108))
            single_leaf += grow_tree(d, d.all_rows(), TreeParams()).root.is_leaf
        self.assertGreaterEqual(single_leaf, 4)
