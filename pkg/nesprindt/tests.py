import json
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from django.test import SimpleTestCase, TestCase, override_settings

from core.exceptions import ConfigError, DataError
from ctree.builder import predict_rows
from ctree.rendering import render_tree
from ctree.types import TreeParams
from dataset.generator import ADULT, CHILD, CLASS_COLUMN, NESTING_COLUMN, CorpusCounts, generate_corpus, write_corpus
from dataset.loaders import dataset_from_frame, read_csv_frame
from dataset.services import rows_with_level
from dataset.types import CATEGORICAL
from prindt.ensemble import build_ensemble, score_ensemble
from prindt.metrics import balanced_accuracy
from prindt.types import ScoredTree
from .config import NestingSpec, ProbeConfig, RunConfig, load_run_config, merged_settings, parse_probe_config
from .models import AnalysisRun
from .probe import heterogeneity_probe, probe_spread
from .report import (
    BA_FULL_FILE, BA_UNDERSAMPLE_FILE, PROBE_COLUMNS, PROBE_FILE, REPORT_FILE, canonical_json, load_report,
    report_to_dict, tree_from_report, write_probe_csv, write_run_outputs,
)
from .runner import BY_FULL, BY_OUTER, best_tree, nesprindt_run, outer_sample
from .services import process_analysis_run, record_run

SCHEMA = (('MLU', CATEGORICAL),)
NESTING = NestingSpec(column=NESTING_COLUMN, small_level=CHILD)


def small_corpus(seed=0, plant='default', counts=None):
    frame = generate_corpus(counts or CorpusCounts(450, 50, 900, 100), seed=seed, plant=plant)
    return dataset_from_frame(frame, CLASS_COLUMN, dict(SCHEMA))


def small_config(**overrides):
    values = dict(
        nesting=NESTING,
        outer_reps=2,
        inner_reps=5,
        percents=(0.3,),
        tree=TreeParams(alpha=0.01),
        k_best=3,
        master_seed=7,
        schema_hint=SCHEMA,
    )
    values.update(overrides)
    return RunConfig(**values)


class TempDirMixin:

    def setUp(self):
        super().setUp()
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)
        super().tearDown()


class ConfigLayeringTests(TempDirMixin, SimpleTestCase):

    def test_reference_defaults(self):
        cfg = load_run_config()
        self.assertEqual((cfg.outer_reps, cfg.inner_reps, cfg.percents, cfg.k_best), (10, 999, (0.06,), 3))
        self.assertEqual(cfg.tree, TreeParams(alpha=0.01, min_split=20, min_leaf=7, max_depth=None))
        self.assertEqual(cfg.nesting, NESTING)

    @override_settings(NESPRINDT_DEFAULTS={'outer_reps': 4, 'inner_reps': 20})
    def test_file_overrides_settings_and_flags_override_file(self):
        path = self.tmp / 'run.json'
        path.write_text(json.dumps({'inner_reps': 50, 'seed': 3, 'forbidden': [
            {'conjuncts': [{'variable': 'AGE', 'relation': 'le', 'value': 66}]},
        ]}))
        cfg = load_run_config(path, {'seed': 42, 'outer_reps': None})
        self.assertEqual((cfg.outer_reps, cfg.inner_reps, cfg.master_seed), (4, 50, 42))
        self.assertEqual(cfg.forbidden[0].conjuncts[0].value, 66.0)

    def test_invalid_values(self):
        for bad in ({'alpha': 1.5}, {'percents': [0.0]}, {'percents': []}, {'outer_reps': 0}, {'seed': -1}):
            with self.subTest(bad=bad):
                with self.assertRaises(ConfigError):
                    load_run_config(overrides=bad)

    def test_conjunct_relation_needs_matching_operand(self):
        with self.assertRaises(ConfigError):
            load_run_config(overrides={'forbidden': [{'conjuncts': [{'variable': 'MLU', 'relation': 'in'}]}]})
        with self.assertRaises(ConfigError):
            load_run_config(overrides={'forbidden': [{'conjuncts': [{'variable': 'AGE', 'relation': 'le'}]}]})

    def test_bad_config_file(self):
        with self.assertRaises(ConfigError):
            load_run_config(self.tmp / 'absent.json')
        path = self.tmp / 'broken.json'
        path.write_text('{not json')
        with self.assertRaises(ConfigError):
            load_run_config(path)

    def test_probe_parts(self):
        self.assertEqual(parse_probe_config(merged_settings(overrides={'parts': 8})).parts, 8)
        with self.assertRaises(ConfigError):
            parse_probe_config(merged_settings(overrides={'parts': 1}))

    def test_config_echo_round_trips(self):
        cfg = small_config()
        document = merged_settings(overrides=cfg.to_dict())
        self.assertEqual(load_run_config(overrides=document), cfg)


@override_settings(NESPRINDT_PARALLEL_BACKEND='threading')
class RunnerTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.d = small_corpus(seed=1)
        cls.cfg = small_config()
        cls.report = nesprindt_run(cls.d, cls.cfg)

    def test_cardinalities(self):
        filtered = sum(result.filtered for result in self.report.outer)
        self.assertEqual(len(self.report.scored_trees), 2 * 5 - filtered)
        self.assertEqual(len(self.report.kept), 2 * 3)
        self.assertTrue(all(item.ba_full is not None for item in self.report.kept))
        self.assertEqual(self.report.predictors, ('PRN_TYPE', 'MLU', 'ETHN_GROUP', 'AGE'))

    def test_outer_samples_keep_every_child_row(self):
        child = rows_with_level(self.d, NESTING_COLUMN, CHILD)
        for result in self.report.outer:
            self.assertTrue(child.issubset(result.under_out))
            self.assertEqual(len(result.under_out), 2 * len(child))
            self.assertEqual(result.under_out, outer_sample(self.d, self.cfg, result.outer))

    def test_stored_accuracies_can_be_recomputed(self):
        for item in self.report.kept:
            under_out = outer_sample(self.d, self.cfg, item.outer)
            outer = balanced_accuracy(predict_rows(item.tree, self.d, under_out), self.d.y[under_out.indices])
            full = balanced_accuracy(predict_rows(item.tree, self.d, self.d.all_rows()), self.d.y)
            self.assertEqual(outer, item.outer_scores)
            self.assertEqual(full, item.full_scores)

    def test_best_trees(self):
        scored = self.report.scored_trees
        best = best_tree(self.report, BY_OUTER)
        expected = min(scored, key=ScoredTree.rank_key)
        self.assertEqual(best.tree_id, expected.tree_id)
        self.assertEqual((best.ba_outer, best.position), (expected.ba_outer, expected.position))
        self.assertIsNotNone(best.full_scores)
        self.assertEqual(best_tree(self.report, BY_FULL).ba_full, max(item.ba_full for item in self.report.kept))
        self.assertEqual(self.report.same_best, best.tree_id == best_tree(self.report, BY_FULL).tree_id)
        with self.assertRaises(ConfigError):
            best_tree(self.report, 'by_luck')

    def test_strategy_b_members_are_top_three_by_full_accuracy(self):
        resorted = sorted(self.report.kept, key=lambda item: (-item.ba_full, item.outer, item.inner))
        self.assertEqual(list(self.report.strategy_b.member_ids), [item.tree_id for item in resorted[:3]])
        ensemble = build_ensemble(resorted[:3])
        self.assertEqual(score_ensemble(ensemble, self.d, self.d.all_rows()), self.report.strategy_b.scores)

    def test_strategy_a_scores_each_outer_sample(self):
        self.assertEqual(len(self.report.strategy_a), 2)
        for result, outer in zip(self.report.strategy_a, self.report.outer):
            self.assertEqual(result.member_ids, tuple(item.tree_id for item in outer.ranked[:3]))
            self.assertEqual(result.scores, score_ensemble(result.ensemble, self.d, outer.under_out))
        best = max(self.report.strategy_a, key=lambda result: (result.scores.ba, -result.outer))
        self.assertEqual(self.report.strategy_a_best, best)

    def test_thread_count_does_not_change_the_report(self):
        threaded = nesprindt_run(self.d, self.cfg, threads=3)
        self.assertEqual(canonical_json(report_to_dict(threaded)), canonical_json(report_to_dict(self.report)))

    def test_summaries(self):
        summary = self.report.summaries['ba_outer']
        self.assertEqual(summary['count'], len(self.report.scored_trees))
        self.assertEqual(sum(summary['histogram']['counts']), summary['count'])
        self.assertEqual(len(summary['histogram']['edges']), 21)

    def test_single_tree_run(self):
        report = nesprindt_run(self.d, small_config(outer_reps=1, inner_reps=1, k_best=1))
        self.assertEqual(len(report.kept), 1)
        self.assertIs(best_tree(report, BY_OUTER), best_tree(report, BY_FULL))
        self.assertTrue(report.same_best)
        self.assertEqual(report.strategy_a[0].member_ids, report.strategy_b.member_ids)

    def test_nesting_misconfiguration(self):
        with self.assertRaises(DataError):
            nesprindt_run(self.d, small_config(nesting=NestingSpec(NESTING_COLUMN, 'teen')))
        with self.assertRaises(ConfigError):
            nesprindt_run(self.d, small_config(predictors=('PRN_TYPE', 'nope')))


@override_settings(NESPRINDT_PARALLEL_BACKEND='threading')
class ProbeTests(TempDirMixin, SimpleTestCase):

    def test_parts_cover_the_large_level_in_order(self):
        d = small_corpus(seed=2)
        results = heterogeneity_probe(d, ProbeConfig(nesting=NESTING, parts=8))
        adult = rows_with_level(d, NESTING_COLUMN, ADULT).indices
        self.assertEqual([result.part for result in results], list(range(1, 9)))
        self.assertEqual(results[0].start, 0)
        self.assertEqual(results[-1].stop, adult.size)
        for before, after in zip(results, results[1:]):
            self.assertEqual(before.stop, after.start)
        self.assertEqual([result.first_row for result in results], [int(adult[r.start]) for r in results])
        self.assertEqual(sum(result.part_size for result in results), adult.size)
        self.assertTrue(all(0.0 <= result.ba <= 1.0 for result in results))

    def test_planted_part_has_the_highest_accuracy(self):
        d = small_corpus(seed=3, plant='heterogeneous', counts=CorpusCounts())
        results = heterogeneity_probe(d, ProbeConfig(nesting=NESTING, parts=8), threads=2)
        self.assertEqual(int(np.argmax([result.ba for result in results])) + 1, 5)
        self.assertGreater(probe_spread(results), 0.1)

    def test_single_class_part_is_flagged(self):
        classes = ['r'] * 10 + ['r'] * 20 + ['z', 'r'] * 10
        speaker = ['child'] * 10 + ['adult'] * 40
        x = [str(i) for i in range(50)]
        d = dataset_from_frame(pd.DataFrame({'class': classes, 'SPEAKER': speaker, 'x': x}), 'class')
        results = heterogeneity_probe(d, ProbeConfig(nesting=NestingSpec('SPEAKER', 'child'), parts=2))
        self.assertTrue(results[0].single_class)
        self.assertEqual(results[0].ba, 0.5)
        self.assertFalse(results[1].single_class)

        frame = read_csv_frame(write_probe_csv(results, self.tmp))
        self.assertEqual(list(frame.columns), PROBE_COLUMNS)
        self.assertEqual((frame.loc[0, 'acc_large'], frame.loc[0, 'acc_small']), ('NA', 'NA'))
        self.assertEqual(frame.loc[0, 'single_class'], 'True')
        self.assertEqual(float(frame.loc[1, 'ba']), results[1].ba)

    def test_parts_must_be_at_least_two(self):
        with self.assertRaises(ConfigError):
            ProbeConfig(nesting=NESTING, parts=1)


@override_settings(NESPRINDT_PARALLEL_BACKEND='threading')
class ReportFilesTests(TempDirMixin, SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.d = small_corpus(seed=4)
        probe = heterogeneity_probe(cls.d, ProbeConfig(nesting=NESTING, parts=4))
        cls.report = nesprindt_run(cls.d, small_config(), probe=probe)

    def test_written_files(self):
        paths = write_run_outputs(self.report, self.tmp)
        text = paths['report'].read_text(encoding='utf-8')
        data = json.loads(text)
        self.assertEqual(text, canonical_json(data))
        self.assertEqual(len(data['ba_outer']), len(self.report.scored_trees))
        self.assertEqual(len(data['trees']), 6)
        self.assertEqual(len(data['probe']), 4)

        under = read_csv_frame(self.tmp / BA_UNDERSAMPLE_FILE)
        full = read_csv_frame(self.tmp / BA_FULL_FILE)
        self.assertEqual(list(under.columns), ['outer', 'inner', 'percent', 'ba'])
        self.assertEqual(list(full.columns), ['outer', 'inner', 'percent', 'ba'])
        self.assertEqual(len(under), len(self.report.scored_trees))
        self.assertEqual(len(full), 6)
        self.assertEqual(len(list((self.tmp / 'trees').glob('*.txt'))), 6)
        probe = read_csv_frame(self.tmp / PROBE_FILE)
        self.assertEqual(list(probe.columns), PROBE_COLUMNS)
        self.assertEqual(list(probe['part']), ['1', '2', '3', '4'])

    def test_same_report_same_bytes(self):
        first = write_run_outputs(self.report, self.tmp / 'a')['report'].read_bytes()
        again = nesprindt_run(self.d, small_config(), probe=self.report.probe)
        second = write_run_outputs(again, self.tmp / 'b')['report'].read_bytes()
        self.assertEqual(first, second)

    def test_rendering_from_report_matches_fit_time(self):
        write_run_outputs(self.report, self.tmp)
        data = load_report(self.tmp / REPORT_FILE)
        best = self.report.best_by_outer
        self.assertEqual(render_tree(tree_from_report(data, best.tree_id)), render_tree(best.tree))
        self.assertEqual(render_tree(tree_from_report(data, 'best-full')), render_tree(self.report.best_by_full.tree))
        with self.assertRaises(ConfigError):
            tree_from_report(data, 'o99-i1-p1')


@override_settings(NESPRINDT_PARALLEL_BACKEND='threading', ENABLE_CELERY=False)
class AnalysisRunLedgerTests(TempDirMixin, TestCase):

    def setUp(self):
        super().setUp()
        self.data = self.tmp / 'corpus.csv'
        write_corpus(generate_corpus(CorpusCounts(450, 50, 900, 100), seed=5), self.data)
        self.document = merged_settings(overrides={
            'outer_reps': 1, 'inner_reps': 3, 'percents': [0.3], 'schema': dict(SCHEMA), 'parts': 4,
        })

    def test_finished_run(self):
        run = record_run('run', self.data, self.tmp / 'out', self.document)
        result = process_analysis_run(run.pk)
        run.refresh_from_db()
        self.assertTrue(result['success'])
        self.assertEqual(run.status, 'finished')
        self.assertEqual(run.exit_code, 0)
        self.assertEqual(run.summary['trees_kept'], 3)
        self.assertTrue((self.tmp / 'out' / REPORT_FILE).is_file())

    def test_finished_probe(self):
        run = record_run('probe', self.data, self.tmp / 'probe', self.document)
        result = process_analysis_run(run.pk)
        self.assertTrue(result['success'])
        self.assertEqual(len(result['summary']['parts']), 4)

    def test_failed_run_keeps_the_exit_code(self):
        run = record_run('run', self.tmp / 'absent.csv', self.tmp / 'out', self.document)
        result = process_analysis_run(run.pk)
        run.refresh_from_db()
        self.assertFalse(result['success'])
        self.assertEqual(result['exit_code'], 2)
        self.assertEqual(run.status, 'failed')
        self.assertIn('not found', run.error_message)

    def test_unwritable_out_dir_marks_the_run_failed(self):
        blocker = self.tmp / 'blocker'
        blocker.write_text('not a directory')
        run = record_run('run', self.data, blocker / 'out', self.document)
        with self.assertLogs('nesprindt.services', level='ERROR') as logs:
            result = process_analysis_run(run.pk)
        run.refresh_from_db()
        self.assertFalse(result['success'])
        self.assertEqual(result['exit_code'], 1)
        self.assertEqual(run.status, 'failed')
        self.assertEqual(run.exit_code, 1)
        self.assertTrue(run.error_message)
        self.assertIsNotNone(run.finished_at)
        self.assertIsNotNone(logs.records[-1].exc_info)

    def test_unknown_run(self):
        self.assertFalse(process_analysis_run(12345)['success'])
        self.assertFalse(AnalysisRun.objects.exists())
