"""
Balanced accuracy.
"""
import numpy as np
from sklearn.metrics import confusion_matrix

from core.exceptions import ScoringError
from dataset.types import LARGE, SMALL
from .types import Scores


def balanced_accuracy(predictions, truth, labels=(LARGE, SMALL)):
    """
    Per-class accuracies and their mean.

    Args:
        predictions: predicted labels
        truth: true labels, containing both classes
        labels: (large, small) label values

    Returns:
        Scores(ba, acc_large, acc_small)
    """
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.shape != truth.shape or truth.size == 0:
        raise ScoringError(
            f"Predictions and truth need equal, non-zero lengths; got {predictions.size} and {truth.size}"
        )
    matrix = confusion_matrix(truth, predictions, labels=list(labels))
    class_sizes = matrix.sum(axis=1)
    if (class_sizes == 0).any():
        missing = [labels[i] for i in np.flatnonzero(class_sizes == 0)]
        raise ScoringError(f"Balanced accuracy is undefined: truth lacks class(es) {missing}")
    acc_large = int(matrix[0, 0]) / int(class_sizes[0])
    acc_small = int(matrix[1, 1]) / int(class_sizes[1])
    return Scores(ba=(acc_large + acc_small) / 2, acc_large=acc_large, acc_small=acc_small)
