"""
Best-k ensembles: member leaf probabilities are averaged, the larger mean
wins, and an exact tie goes to the small class. A one-member ensemble
predicts exactly like its tree.
"""
import numpy as np

from ctree.builder import classify, leaf_for, predict_proba_rows
from dataset.types import LARGE, SMALL
from .metrics import balanced_accuracy
from .types import Ensemble


def build_ensemble(scored_trees):
    return Ensemble(members=tuple(item.tree for item in scored_trees))


def ensemble_proba(e, row):
    pairs = np.array([leaf_for(tree, row).probabilities for tree in e.members])
    return tuple(pairs.mean(axis=0).tolist())


def ensemble_predict(e, row):
    probabilities = ensemble_proba(e, row)
    code = SMALL if probabilities[SMALL] >= probabilities[LARGE] else LARGE
    return e.members[0].class_levels[code]


def ensemble_proba_rows(e, d, within):
    total = None
    for tree in e.members:
        probabilities = predict_proba_rows(tree, d, within)
        total = probabilities if total is None else total + probabilities
    return total / len(e.members)


def ensemble_predict_rows(e, d, within):
    return classify(ensemble_proba_rows(e, d, within))


def score_ensemble(e, d, within):
    return balanced_accuracy(ensemble_predict_rows(e, d, within), d.y[d.check_indices(within)])
