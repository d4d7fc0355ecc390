"""
Management command running the nested undersampling procedure.
Run via: python manage.py run_nesprindt --data corpus.csv --out out/ --seed 42
"""
import logging

from core.utils.task_helper import run_task_safe
from nesprindt.config import merged_settings, parse_run_config
from nesprindt.management.base import NesprindtCommand
from nesprindt.services import process_analysis_run, record_run, run_analysis
from nesprindt.tasks import execute_analysis_run

logger = logging.getLogger(__name__)


class Command(NesprindtCommand):
    help = 'Run nested undersampling tree induction and write report.json, accuracy CSVs and tree renderings'

    def add_arguments(self, parser):
        parser.add_argument('--data', required=True, help='Input CSV (first row header)')
        parser.add_argument('--out', required=True, help='Output directory')
        parser.add_argument('--config', help='JSON configuration file; flags override its values')
        parser.add_argument('--seed', type=int, help='Master seed')
        parser.add_argument('--outer-reps', type=int, dest='outer_reps', help='Outer repetitions')
        parser.add_argument('--inner-reps', type=int, dest='inner_reps', help='Inner repetitions')
        parser.add_argument(
            '--probe-parts',
            type=int,
            dest='probe_parts',
            help='Also run the heterogeneity probe with this many parts'
        )
        self.add_threads_argument(parser)
        parser.add_argument(
            '--record',
            action='store_true',
            help='Record the run in the AnalysisRun ledger'
        )
        parser.add_argument(
            '--background',
            action='store_true',
            help='Queue the run on Celery (runs in-process when Celery is disabled)'
        )

    def handle(self, *args, **options):
        document = merged_settings(options['config'], {
            'seed': options['seed'],
            'outer_reps': options['outer_reps'],
            'inner_reps': options['inner_reps'],
            'probe_parts': options['probe_parts'],
        })
        cfg = parse_run_config(document)
        threads = self.threads(options)

        if options['record'] or options['background']:
            run = record_run('run', options['data'], options['out'], document, threads=threads)
            self.stdout.write(f'Recorded AnalysisRun #{run.pk}')
            if options['background']:
                dispatched = run_task_safe(execute_analysis_run, process_analysis_run, run.pk)
                if dispatched['queued']:
                    self.stdout.write(self.style.SUCCESS(f"Queued as task {dispatched['task_id']}"))
                    return
                summary = self.fail_from_result(dispatched['result'])['summary']
            else:
                summary = self.fail_from_result(process_analysis_run(run.pk))['summary']
        else:
            summary = run_analysis(options['data'], options['out'], cfg, threads=threads)

        self.stdout.write(
            f"Scored {summary['trees_scored']} trees "
            f"({summary['trees_filtered']} filtered), kept {summary['trees_kept']}"
        )
        self.stdout.write(
            f"Best on outer samples: {summary['best_by_outer']} ba={summary['best_by_outer_ba']:.4f}"
        )
        self.stdout.write(
            f"Best on full data:     {summary['best_by_full']} ba={summary['best_by_full_ba']:.4f}"
        )
        if summary['same_best']:
            self.stdout.write('Both criteria select the same tree')
        self.stdout.write(
            f"Ensembles: strategy A ba={summary['strategy_a_ba']:.4f}, strategy B ba={summary['strategy_b_ba']:.4f}"
        )
        self.stdout.write(self.style.SUCCESS(f"Report written to {summary['report']}"))
