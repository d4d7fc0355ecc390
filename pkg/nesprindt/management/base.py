"""
Shared base for the analysis commands: domain errors become CommandErrors
carrying the documented exit status (1 configuration, 2 data, 3 empty
result).
"""
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import ConfigError, NesprindtError


class NesprindtCommand(BaseCommand):

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except NesprindtError as e:
            raise CommandError(str(e), returncode=e.exit_code) from e

    def add_threads_argument(self, parser):
        parser.add_argument(
            '--threads',
            type=int,
            default=None,
            help='Worker count (default: NESPRINDT_THREADS); results do not depend on it'
        )

    def threads(self, options):
        from django.conf import settings

        threads = options.get('threads') or getattr(settings, 'NESPRINDT_THREADS', 1)
        if threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {threads}")
        return threads

    def fail_from_result(self, result):
        """Raise for a failed service result dict, else return it."""
        if not result['success']:
            raise CommandError(result['error'], returncode=result['exit_code'])
        return result
