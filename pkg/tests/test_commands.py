"""
End-to-end tests for the management commands.
"""
import json
import shutil
import tempfile
from io import StringIO
from pathlib import Path

import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from nesprindt.models import AnalysisRun

SMALL_COUNTS = ['450', '50', '900', '100']


@override_settings(NESPRINDT_PARALLEL_BACKEND='threading', ENABLE_CELERY=False)
class CommandTestCase(TestCase):

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())
        self.data = self.tmp / 'corpus.csv'
        self.call('generate_corpus', '--out', str(self.data), '--seed', '11', '--counts', *SMALL_COUNTS)
        self.config = self.tmp / 'run.json'
        self.config.write_text(json.dumps({
            'schema': {'MLU': 'categorical'},
            'outer_reps': 2,
            'inner_reps': 4,
            'percents': [0.3],
        }))

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def call(self, *args):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def run_command(self, out_dir, *extra):
        return self.call(
            'run_nesprindt', '--data', str(self.data), '--out', str(out_dir),
            '--config', str(self.config), '--seed', '42', *extra,
        )

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as cm:
            self.call(*args)
        self.assertEqual(cm.exception.returncode, code)


class GenerateCorpusCommandTests(CommandTestCase):

    def test_counts(self):
        frame = pd.read_csv(self.data, dtype=str)
        self.assertEqual(len(frame), 1500)
        self.assertEqual(list(frame.columns), ['class', 'PRN_TYPE', 'MLU', 'ETHN_GROUP', 'AGE', 'SPEAKER'])
        self.assertEqual(frame.groupby('SPEAKER')['class'].value_counts().to_dict(), {
            ('adult', 'realized'): 900, ('adult', 'zero'): 100,
            ('child', 'realized'): 450, ('child', 'zero'): 50,
        })

    def test_invalid_minority_rate(self):
        self.assertExitCode(1, 'generate_corpus', '--out', str(self.tmp / 'x.csv'), '--minority-rate', '0')

    def test_unknown_plant(self):
        self.assertExitCode(1, 'generate_corpus', '--out', str(self.tmp / 'x.csv'), '--plant', 'everything')


class RunCommandTests(CommandTestCase):

    def test_outputs(self):
        output = self.run_command(self.tmp / 'out')
        self.assertIn('kept 6', output)
        report = json.loads((self.tmp / 'out' / 'report.json').read_text())
        self.assertEqual(report['config']['seed'], 42)
        self.assertEqual(len(report['trees']), 6)
        with open(self.tmp / 'out' / 'ba_undersample.csv') as f:
            self.assertEqual(f.readline().strip(), 'outer,inner,percent,ba')
        with open(self.tmp / 'out' / 'ba_full.csv') as f:
            self.assertEqual(len(f.readlines()), 7)

    def test_same_seed_gives_identical_bytes(self):
        self.run_command(self.tmp / 'a')
        self.run_command(self.tmp / 'b', '--threads', '3')
        for name in ('report.json', 'ba_undersample.csv', 'ba_full.csv'):
            with self.subTest(file=name):
                self.assertEqual((self.tmp / 'a' / name).read_bytes(), (self.tmp / 'b' / name).read_bytes())

    def test_render_matches_the_written_tree(self):
        self.run_command(self.tmp / 'out')
        report = json.loads((self.tmp / 'out' / 'report.json').read_text())
        best = report['best_by_outer']
        rendered = self.call('render_tree', '--report', str(self.tmp / 'out' / 'report.json'), '--tree-id', 'best-outer')
        self.assertEqual(rendered, (self.tmp / 'out' / 'trees' / f'{best}.txt').read_text())

    def test_render_unknown_tree(self):
        self.run_command(self.tmp / 'out')
        self.assertExitCode(1, 'render_tree', '--report', str(self.tmp / 'out' / 'report.json'), '--tree-id', 'o9-i9-p9')

    def test_render_missing_report(self):
        self.assertExitCode(1, 'render_tree', '--report', str(self.tmp / 'none.json'), '--tree-id', 'best-full')

    def test_missing_class_column(self):
        frame = pd.read_csv(self.data, dtype=str).drop(columns=['class'])
        frame.to_csv(self.data, index=False)
        self.assertExitCode(2, 'run_nesprindt', '--data', str(self.data), '--out', str(self.tmp / 'out'))

    def test_bad_config(self):
        self.config.write_text(json.dumps({'alpha': 2}))
        self.assertExitCode(1, 'run_nesprindt', '--data', str(self.data), '--out', str(self.tmp / 'out'),
                            '--config', str(self.config))

    def test_with_probe(self):
        self.run_command(self.tmp / 'out', '--probe-parts', '4')
        probe = pd.read_csv(self.tmp / 'out' / 'probe.csv')
        self.assertEqual(list(probe['part']), [1, 2, 3, 4])

    def test_background_without_celery_runs_in_process(self):
        output = self.run_command(self.tmp / 'out', '--background')
        run = AnalysisRun.objects.get()
        self.assertIn(f'AnalysisRun #{run.pk}', output)
        self.assertEqual(run.status, 'finished')
        self.assertEqual(run.summary['trees_kept'], 6)

    def test_recorded_failure_keeps_exit_code(self):
        self.assertExitCode(2, 'run_nesprindt', '--data', str(self.tmp / 'absent.csv'), '--out', str(self.tmp / 'out'),
                            '--config', str(self.config), '--record')
        self.assertEqual(AnalysisRun.objects.get().status, 'failed')


class ProbeCommandTests(CommandTestCase):

    def test_probe_table(self):
        output = self.call('probe_heterogeneity', '--data', str(self.data), '--out', str(self.tmp / 'out'), '--parts', '5')
        self.assertIn('Spread', output)
        probe = pd.read_csv(self.tmp / 'out' / 'probe.csv')
        self.assertEqual(len(probe), 5)
        self.assertEqual(int(probe['part_size'].sum()), 1000)

    def test_one_part_is_rejected(self):
        self.assertExitCode(1, 'probe_heterogeneity', '--data', str(self.data), '--out', str(self.tmp / 'out'),
                            '--parts', '1')
