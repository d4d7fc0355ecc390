"""
Management command for the ordered-part heterogeneity probe.
Run via: python manage.py probe_heterogeneity --data corpus.csv --out out/ --parts 8
"""
from core.utils.task_helper import run_task_safe
from nesprindt.config import merged_settings, parse_probe_config
from nesprindt.management.base import NesprindtCommand
from nesprindt.services import process_analysis_run, record_run, run_probe
from nesprindt.tasks import execute_analysis_run


class Command(NesprindtCommand):
    help = 'Fit one tree per ordered part of the large nesting level and write probe.csv'

    def add_arguments(self, parser):
        parser.add_argument('--data', required=True, help='Input CSV (first row header)')
        parser.add_argument('--out', required=True, help='Output directory')
        parser.add_argument('--config', help='JSON configuration file; flags override its values')
        parser.add_argument('--parts', type=int, help='Number of ordered parts (>= 2)')
        self.add_threads_argument(parser)
        parser.add_argument('--record', action='store_true', help='Record the probe in the AnalysisRun ledger')
        parser.add_argument('--background', action='store_true', help='Queue the probe on Celery')

    def handle(self, *args, **options):
        document = merged_settings(options['config'], {'parts': options['parts']})
        cfg = parse_probe_config(document)
        threads = self.threads(options)

        if options['record'] or options['background']:
            run = record_run('probe', options['data'], options['out'], document, threads=threads)
            if options['background']:
                dispatched = run_task_safe(execute_analysis_run, process_analysis_run, run.pk)
                if dispatched['queued']:
                    self.stdout.write(self.style.SUCCESS(f"Queued as task {dispatched['task_id']}"))
                    return
                summary = self.fail_from_result(dispatched['result'])['summary']
            else:
                summary = self.fail_from_result(process_analysis_run(run.pk))['summary']
        else:
            summary = run_probe(options['data'], options['out'], cfg, threads=threads)

        for part in summary['parts']:
            flag = ' (single class)' if part['single_class'] else ''
            self.stdout.write(
                f"  part {part['part']}: rows {part['first_row']}-{part['last_row']} "
                f"ba={part['ba']:.4f}{flag}"
            )
        self.stdout.write(f"Spread (max - min ba): {summary['spread']:.4f}")
        self.stdout.write(self.style.SUCCESS(f"Probe table written to {summary['probe']}"))
