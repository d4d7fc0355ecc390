"""
Report serialization and file exports.

report.json is canonical: sorted keys, fixed indentation and no run-time
values such as timestamps, hostnames or thread counts, so two runs with the
same data, configuration and seed produce identical bytes.
"""
import json
import logging
from pathlib import Path

import pandas as pd

from core.exceptions import ConfigError, DataError
from ctree.rendering import render_tree, tree_from_dict, tree_to_dict

logger = logging.getLogger(__name__)

REPORT_FILE = 'report.json'
BA_UNDERSAMPLE_FILE = 'ba_undersample.csv'
BA_FULL_FILE = 'ba_full.csv'
PROBE_FILE = 'probe.csv'
TREES_DIR = 'trees'
ACCURACY_COLUMNS = ['outer', 'inner', 'percent', 'ba']
PROBE_COLUMNS = [
    'part', 'start', 'stop', 'first_row', 'last_row', 'part_size', 'train_size',
    'small_share', 'ba', 'acc_large', 'acc_small', 'single_class',
]
# Written for accuracies a single-class probe part does not define.
UNDEFINED_CELL = 'NA'
TREE_ALIASES = {'best-outer': 'best_by_outer', 'best-full': 'best_by_full'}


def canonical_json(data):
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + '\n'


def scored_tree_record(item, with_tree=False):
    record = {
        'tree_id': item.tree_id,
        'outer': item.outer,
        'inner': item.inner,
        'percent_index': item.percent_index,
        'percent': item.percent,
        'outer_scores': item.outer_scores.to_dict(),
    }
    if item.full_scores is not None:
        record['full_scores'] = item.full_scores.to_dict()
    if with_tree:
        record['tree'] = tree_to_dict(item.tree)
        record['rendered'] = render_tree(item.tree)
        record['n_nodes'] = len(item.tree.nodes())
        record['n_leaves'] = item.tree.n_leaves
    return record


def report_to_dict(report):
    data = {
        'config': report.config.to_dict(),
        'dataset': report.dataset,
        'predictors': list(report.predictors),
        'full_minority_share': report.full_minority_share,
        'outer': [
            {
                'outer': result.outer,
                'seed_path': result.seed_path,
                'under_out': {'rows': len(result.under_out), 'digest': result.under_out.digest()},
                'minority_share': result.minority_share,
                'fitted': result.fitted,
                'filtered': result.filtered,
                'top': [item.tree_id for item in result.top],
            }
            for result in report.outer
        ],
        'ba_outer': [scored_tree_record(item) for item in report.scored_trees],
        'trees': [scored_tree_record(item, with_tree=True) for item in report.kept],
        'best_by_outer': report.best_by_outer.tree_id,
        'best_by_full': report.best_by_full.tree_id,
        'same_best': report.same_best,
        'strategy_a': [result.to_dict() for result in report.strategy_a],
        'strategy_a_best': report.strategy_a_best.to_dict(),
        'strategy_b': report.strategy_b.to_dict(),
        'summaries': report.summaries,
        'probe': [result.to_dict() for result in report.probe] if report.probe is not None else None,
    }
    return data


def accuracy_frame(scored_trees, full=False):
    """One row per tree with the accuracy on its outer sample, or on the full data."""
    rows = [
        (item.outer, item.inner, item.percent, item.ba_full if full else item.ba_outer)
        for item in scored_trees
    ]
    return pd.DataFrame(rows, columns=ACCURACY_COLUMNS)


def probe_frame(results):
    return pd.DataFrame([result.to_dict() for result in results], columns=PROBE_COLUMNS)


def write_run_outputs(report, out_dir):
    """
    Write report.json, both accuracy CSVs, the probe table (when present)
    and one text rendering per kept tree.

    Returns:
        dict of written paths by kind
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {'report': out_dir / REPORT_FILE}
    paths['report'].write_text(canonical_json(report_to_dict(report)), encoding='utf-8')

    paths['ba_undersample'] = out_dir / BA_UNDERSAMPLE_FILE
    accuracy_frame(report.scored_trees).to_csv(paths['ba_undersample'], index=False)
    paths['ba_full'] = out_dir / BA_FULL_FILE
    accuracy_frame(report.kept, full=True).to_csv(paths['ba_full'], index=False)

    if report.probe is not None:
        paths['probe'] = write_probe_csv(report.probe, out_dir)

    trees_dir = out_dir / TREES_DIR
    trees_dir.mkdir(exist_ok=True)
    for item in report.kept:
        (trees_dir / f"{item.tree_id}.txt").write_text(render_tree(item.tree), encoding='utf-8')
    paths['trees'] = trees_dir
    logger.info(f"Wrote report and {len(report.kept)} tree renderings to {out_dir}")
    return paths


def write_probe_csv(results, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / PROBE_FILE
    probe_frame(results).to_csv(path, index=False, na_rep=UNDEFINED_CELL)
    return path


def load_report(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Report not found: {path}")
    try:
        return json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise DataError(f"Report {path} is not valid JSON: {e}") from e


def tree_from_report(data, tree_id):
    """
    Rebuild a kept tree from a loaded report. ``tree_id`` is an id such as
    ``o3-i17-p1`` or one of the aliases ``best-outer`` and ``best-full``.
    """
    if tree_id in TREE_ALIASES:
        tree_id = data[TREE_ALIASES[tree_id]]
    for record in data.get('trees', []):
        if record['tree_id'] == tree_id:
            return tree_from_dict(record['tree'])
    known = ', '.join(record['tree_id'] for record in data.get('trees', []))
    raise ConfigError(f"Unknown tree id {tree_id!r}; the report holds: {known}")
