"""
Reference-scale checks on the default 20,550-row synthetic corpus.
These take minutes; set NESPRINDT_SLOW_TESTS=1 to run them.
"""
import os
import unittest

import numpy as np
from django.test import SimpleTestCase, override_settings

from ctree.types import TreeParams
from dataset.generator import CHILD, CLASS_COLUMN, NESTING_COLUMN, CorpusCounts, generate_corpus
from dataset.loaders import dataset_from_frame
from dataset.types import CATEGORICAL
from nesprindt.config import NestingSpec, ProbeConfig, RunConfig
from nesprindt.probe import heterogeneity_probe, probe_spread
from nesprindt.report import canonical_json, report_to_dict
from nesprindt.runner import nesprindt_run

SLOW = os.environ.get('NESPRINDT_SLOW_TESTS') == '1'
SCHEMA = {'MLU': CATEGORICAL}
NESTING = NestingSpec(column=NESTING_COLUMN, small_level=CHILD)


def corpus(seed, plant='default'):
    return dataset_from_frame(generate_corpus(CorpusCounts(), seed=seed, plant=plant), CLASS_COLUMN, SCHEMA)


@unittest.skipUnless(SLOW, 'set NESPRINDT_SLOW_TESTS=1 for reference-scale runs')
class ReferenceRunTests(SimpleTestCase):

    def test_reference_run_shape(self):
        cfg = RunConfig(nesting=NESTING, schema_hint=tuple(SCHEMA.items()))
        report = nesprindt_run(corpus(0), cfg, threads=8)
        self.assertEqual(sum(result.filtered for result in report.outer), 0)
        self.assertEqual(len(report.scored_trees), 9990)
        self.assertEqual(len(report.kept), 30)
        members = sorted(report.kept, key=lambda item: (-item.ba_full, item.outer, item.inner))[:3]
        self.assertEqual(report.strategy_b.member_ids, tuple(item.tree_id for item in members))

    def test_undersample_accuracy_exceeds_full_accuracy(self):
        wins = 0
        for seed in range(10):
            cfg = RunConfig(
                nesting=NESTING, outer_reps=10, inner_reps=99, tree=TreeParams(alpha=0.01),
                master_seed=seed, schema_hint=tuple(SCHEMA.items()),
            )
            report = nesprindt_run(corpus(seed), cfg, threads=8)
            best = [result.top[0] for result in report.outer]
            wins += np.mean([item.ba_outer for item in best]) > np.mean([item.ba_full for item in best])
        self.assertGreaterEqual(wins, 9)


@unittest.skipUnless(SLOW, 'set NESPRINDT_SLOW_TESTS=1 for reference-scale runs')
class ReferenceProbeTests(SimpleTestCase):

    def test_planted_part_wins(self):
        hits = 0
        for seed in range(10):
            results = heterogeneity_probe(corpus(seed, 'heterogeneous'), ProbeConfig(nesting=NESTING), threads=8)
            hits += int(np.argmax([result.ba for result in results])) == 4
        self.assertGreaterEqual(hits, 9)

    def test_homogeneous_parts_stay_close(self):
        close = 0
        for seed in range(10):
            results = heterogeneity_probe(corpus(seed), ProbeConfig(nesting=NESTING), threads=8)
            close += probe_spread(results) < 0.1
        self.assertGreaterEqual(close, 8)


@unittest.skipUnless(SLOW, 'set NESPRINDT_SLOW_TESTS=1 for reference-scale runs')
@override_settings(NESPRINDT_PARALLEL_BACKEND='loky')
class ProcessPoolTests(SimpleTestCase):

    def test_worker_processes_do_not_change_the_report(self):
        d = corpus(3)
        cfg = RunConfig(
            nesting=NESTING, outer_reps=2, inner_reps=40, master_seed=3, schema_hint=tuple(SCHEMA.items()),
        )
        probe = heterogeneity_probe(d, ProbeConfig(nesting=NESTING), threads=1)
        serial = canonical_json(report_to_dict(nesprindt_run(d, cfg, threads=1, probe=probe)))
        pooled_probe = heterogeneity_probe(d, ProbeConfig(nesting=NESTING), threads=8)
        pooled = canonical_json(report_to_dict(nesprindt_run(d, cfg, threads=8, probe=pooled_probe)))
        self.assertEqual(serial, pooled)
