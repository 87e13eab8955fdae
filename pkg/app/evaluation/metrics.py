'''
Module for confusion matrices and classification metrics.

Created on 19-10-2026
@author: Harry New

'''
import logging

import numpy as np

from app.core.errors import MetricsError
from app.models import ABSENT, ConfusionMatrix, MetricsReport

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

def confusion(truth, pred, positive_label: int = ABSENT) -> ConfusionMatrix:
    """
    Count true/false positives and negatives.

    Args:
        truth (array-like): True labels.
        pred (array-like): Predicted labels.
        positive_label (int, optional): Positive class. Defaults to ABSENT.

    Returns:
        ConfusionMatrix: Counts.
    """
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.shape != pred.shape:
        raise MetricsError(f"Truth and prediction lengths differ: {len(truth)} != {len(pred)}.")
    if truth.size == 0:
        raise MetricsError("Cannot build a confusion matrix from empty inputs.")
    actual = truth == positive_label
    predicted = pred == positive_label
    return ConfusionMatrix(
        tp=int(np.sum(actual & predicted)),
        tn=int(np.sum(~actual & ~predicted)),
        fp=int(np.sum(~actual & predicted)),
        fn=int(np.sum(actual & ~predicted)),
    )


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """
    Accuracy, precision, recall and F-score. A zero denominator yields 0 and
    sets the matching undefined flag.

    Args:
        cm (ConfusionMatrix): Counts.

    Returns:
        MetricsReport: Metrics.
    """
    if cm.total == 0:
        raise MetricsError("Cannot compute metrics of an empty confusion matrix.")
    accuracy = (cm.tp + cm.tn) / cm.total

    precision_undefined = cm.tp + cm.fp == 0
    precision = 0.0 if precision_undefined else cm.tp / (cm.tp + cm.fp)
    recall_undefined = cm.tp + cm.fn == 0
    recall = 0.0 if recall_undefined else cm.tp / (cm.tp + cm.fn)
    f1_undefined = precision + recall == 0
    f1 = 0.0 if f1_undefined else 2 * precision * recall / (precision + recall)

    if precision_undefined or recall_undefined or f1_undefined:
        logger.warning(f"Degenerate metrics for {cm.model_dump()}: undefined values reported as 0.")
    return MetricsReport(
        accuracy=accuracy, precision=precision, recall=recall, f1=f1,
        precision_undefined=precision_undefined,
        recall_undefined=recall_undefined,
        f1_undefined=f1_undefined,
    )


def mean_report(reports: list[MetricsReport]) -> MetricsReport:
    """
    Metric-wise mean; a flag is set when any input has it set.
    """
    if not reports:
        raise MetricsError("Cannot average an empty list of metrics.")
    return MetricsReport(
        accuracy=float(np.mean([r.accuracy for r in reports])),
        precision=float(np.mean([r.precision for r in reports])),
        recall=float(np.mean([r.recall for r in reports])),
        f1=float(np.mean([r.f1 for r in reports])),
        precision_undefined=any(r.precision_undefined for r in reports),
        recall_undefined=any(r.recall_undefined for r in reports),
        f1_undefined=any(r.f1_undefined for r in reports),
    )
