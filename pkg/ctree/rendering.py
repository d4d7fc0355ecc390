"""
Text rendering and JSON-ready (de)serialization of trees.
"""
from dataset.types import ColumnSchema
from .types import Node, Split, Tree, TreeParams, VariableTest

INDENT = '  '


def render_tree(t):
    """
    One line per node, children indented under their parent:

        [1] root -> split on AGE (p_adj=3.2e-05) | n=100 counts=90/10 small=0.100
          [2] AGE <= 145.5 -> leaf | n=60 counts=58/2 small=0.033
    """
    lines = []
    _render(t.root, 'root', lines)
    return '\n'.join(lines) + '\n'


def _render(node, condition, lines):
    if node.is_leaf:
        body = 'leaf'
    else:
        body = f"split on {node.split.variable} (p_adj={node.test.p_adjusted:.4g})"
    lines.append(
        f"{INDENT * node.depth}[{node.node_id}] {condition} -> {body} | "
        f"n={node.n} counts={node.n_large}/{node.n_small} small={node.small_share:.3f}"
    )
    if not node.is_leaf:
        _render(node.left, node.split.describe('left'), lines)
        _render(node.right, node.split.describe('right'), lines)


def tree_to_dict(t):
    return {
        'params': t.params.to_dict(),
        'class_levels': list(t.class_levels),
        'columns': [
            {'name': col.name, 'kind': col.kind, 'levels': list(col.levels)}
            for col in t.columns
        ],
        'root': _node_to_dict(t.root),
    }


def _node_to_dict(node):
    data = {
        'id': node.node_id,
        'depth': node.depth,
        'counts': [node.n_large, node.n_small],
    }
    if not node.is_leaf:
        data['test'] = node.test.to_dict()
        data['split'] = node.split.to_dict()
        data['left'] = _node_to_dict(node.left)
        data['right'] = _node_to_dict(node.right)
    return data


def tree_from_dict(data):
    return Tree(
        root=_node_from_dict(data['root']),
        params=TreeParams(**data['params']),
        columns=tuple(
            ColumnSchema(name=col['name'], kind=col['kind'], levels=tuple(col['levels']))
            for col in data['columns']
        ),
        class_levels=tuple(data['class_levels']),
    )


def _node_from_dict(data):
    n_large, n_small = data['counts']
    if 'split' not in data:
        return Node(node_id=data['id'], depth=data['depth'], n_large=n_large, n_small=n_small)
    split = data['split']
    return Node(
        node_id=data['id'],
        depth=data['depth'],
        n_large=n_large,
        n_small=n_small,
        test=VariableTest(**data['test']),
        split=Split(
            variable=split['variable'],
            kind=split['kind'],
            threshold=split.get('threshold'),
            left_levels=tuple(split.get('left_levels', ())),
            right_levels=tuple(split.get('right_levels', ())),
            statistic=split['statistic'],
        ),
        left=_node_from_dict(data['left']),
        right=_node_from_dict(data['right']),
    )
