"""
Interpretability filter.

A tree is rejected when the conditions accumulated along some root-to-leaf
path imply every conjunct of a forbidden combination. Implication is
containment, not overlap: a categorical conjunct is implied when the levels
still reachable on the path all lie in its level set; ``<= v`` is implied by
a path upper bound <= v; ``> v`` by a path lower bound >= v. A variable the
path never constrains implies nothing.
"""
from dataclasses import dataclass

from core.exceptions import ConfigError
from .types import RELATION_GT, RELATION_IN, RELATION_LE, RELATIONS


@dataclass(frozen=True)
class Witness:
    """A path that implies a forbidden combination."""
    node_ids: tuple
    combination: object
    conditions: tuple

    def describe(self):
        path = ' -> '.join(str(node_id) for node_id in self.node_ids)
        return f"path {path} ({'; '.join(self.conditions)}) implies {self.combination.describe()}"


def validate_forbidden(forbidden, schema):
    """Check variables exist and relations fit the column kinds."""
    columns = {col.name: col for col in schema}
    for combination in forbidden:
        if not combination.conjuncts:
            raise ConfigError("A forbidden combination needs at least one conjunct")
        for conjunct in combination.conjuncts:
            col = columns.get(conjunct.variable)
            if col is None:
                raise ConfigError(f"Forbidden combination names unknown variable {conjunct.variable!r}")
            if conjunct.relation not in RELATIONS:
                raise ConfigError(f"Unknown relation {conjunct.relation!r}; use one of {RELATIONS}")
            if col.is_categorical != (conjunct.relation == RELATION_IN):
                raise ConfigError(
                    f"Relation {conjunct.relation!r} does not fit {col.kind} variable {conjunct.variable!r}"
                )
            if col.is_categorical:
                unknown = set(conjunct.levels) - set(col.levels)
                if unknown or not conjunct.levels:
                    raise ConfigError(
                        f"Forbidden levels {sorted(unknown) or '[]'} are not levels of {conjunct.variable!r}"
                    )
            elif conjunct.value is None:
                raise ConfigError(f"Numeric conjunct on {conjunct.variable!r} needs a value")


def find_forbidden_path(t, forbidden):
    """First path (pre-order) implying a forbidden combination, or None."""
    if not forbidden:
        return None
    return _search(t, t.root, {}, (), (), forbidden)


def check_interpretable(t, forbidden):
    return find_forbidden_path(t, forbidden) is None


def _search(t, node, constraints, node_ids, conditions, forbidden):
    node_ids = node_ids + (node.node_id,)
    if node.is_leaf:
        for combination in forbidden:
            if all(_implied(conjunct, constraints) for conjunct in combination.conjuncts):
                return Witness(node_ids=node_ids, combination=combination, conditions=conditions)
        return None
    for side, child in (('left', node.left), ('right', node.right)):
        narrowed = _narrow(t, constraints, node.split, side)
        found = _search(t, child, narrowed, node_ids, conditions + (node.split.describe(side),), forbidden)
        if found is not None:
            return found
    return None


def _narrow(t, constraints, split, side):
    narrowed = dict(constraints)
    if split.is_numeric:
        lower, upper = narrowed.get(split.variable, (None, None))
        if side == 'left':
            upper = split.threshold if upper is None else min(upper, split.threshold)
        else:
            lower = split.threshold if lower is None else max(lower, split.threshold)
        narrowed[split.variable] = (lower, upper)
    else:
        reachable = narrowed.get(split.variable)
        if reachable is None:
            reachable = frozenset(t.column(split.variable).levels)
        side_levels = split.left_levels if side == 'left' else split.right_levels
        narrowed[split.variable] = reachable & frozenset(side_levels)
    return narrowed


def _implied(conjunct, constraints):
    if conjunct.variable not in constraints:
        return False
    constraint = constraints[conjunct.variable]
    if conjunct.relation == RELATION_IN:
        return constraint <= frozenset(conjunct.levels)
    lower, upper = constraint
    if conjunct.relation == RELATION_LE:
        return upper is not None and upper <= conjunct.value
    if conjunct.relation == RELATION_GT:
        return lower is not None and lower >= conjunct.value
    return False
