"""
Write a synthetic child/adult corpus with planted effects.
Run via: python manage.py generate_corpus --out corpus.csv --seed 7 --plant heterogeneous
"""
from pathlib import Path

from core.exceptions import ConfigError
from dataset.generator import PLANT_MODES, CorpusCounts, generate_corpus, write_corpus
from nesprindt.management.base import NesprindtCommand


class Command(NesprindtCommand):
    help = 'Generate a synthetic corpus (default counts 2899/326 child, 16543/782 adult)'

    def add_arguments(self, parser):
        parser.add_argument('--out', required=True, help='Output CSV path')
        parser.add_argument('--seed', type=int, default=0, help='Generator seed')
        parser.add_argument('--plant', default='default', help=f"Planted effects: {', '.join(PLANT_MODES)}")
        parser.add_argument(
            '--counts',
            type=int,
            nargs=4,
            metavar=('CHILD_LARGE', 'CHILD_SMALL', 'ADULT_LARGE', 'ADULT_SMALL'),
            help='Rows per speaker group and class'
        )
        parser.add_argument(
            '--minority-rate',
            type=float,
            dest='minority_rate',
            help='Small-class share applied to both speaker groups, in (0, 1)'
        )
        parser.add_argument('--parts', type=int, default=8, help='Ordered adult parts for the heterogeneous plant')
        parser.add_argument('--signal-part', type=int, default=5, dest='signal_part', help='1-based signal part')

    def handle(self, *args, **options):
        if options['seed'] < 0:
            raise ConfigError(f"--seed must be non-negative, got {options['seed']}")
        counts = CorpusCounts(*options['counts']) if options['counts'] else CorpusCounts()
        counts = counts.with_minority_rate(options['minority_rate'])
        frame = generate_corpus(
            counts,
            seed=options['seed'],
            plant=options['plant'],
            parts=options['parts'],
            signal_part=options['signal_part'],
        )
        path = Path(options['out'])
        path.parent.mkdir(parents=True, exist_ok=True)
        write_corpus(frame, path)
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(frame)} rows to {path}'))
