"""
Print the text rendering of a tree stored in a report.
Run via: python manage.py render_tree --report out/report.json --tree-id best-outer
"""
from ctree.rendering import render_tree
from nesprindt.management.base import NesprindtCommand
from nesprindt.report import load_report, tree_from_report


class Command(NesprindtCommand):
    help = 'Render a kept tree from report.json (ids like o3-i17-p1, or best-outer / best-full)'

    def add_arguments(self, parser):
        parser.add_argument('--report', required=True, help='Path to report.json')
        parser.add_argument('--tree-id', required=True, dest='tree_id', help='Tree id or alias')

    def handle(self, *args, **options):
        data = load_report(options['report'])
        self.stdout.write(render_tree(tree_from_report(data, options['tree_id'])), ending='')
