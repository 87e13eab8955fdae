'''
Module for repeated (stratified) k-fold cross-validation.

Created on 19-10-2026
@author: Harry New

'''
import logging

import numpy as np
from joblib import Parallel, delayed

from app.core.config import derive_seed
from app.core.errors import StratificationError
from app.evaluation.metrics import confusion, mean_report, metrics
from app.learners import fit, predict_batch
from app.learners.base import Hyperparams
from app.models import ABSENT, ConfusionMatrix, CvResult, FeatureSet, LabeledDataset

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -
# FOLDS

def stratified_folds(labels: np.ndarray, k: int, rng: np.random.Generator, *, stratified: bool = True) -> np.ndarray:
    """
    Assign every row to one of k folds. Each class is shuffled and dealt
    round-robin, continuing from where the previous class stopped, so fold
    sizes differ by at most one row per class.

    Args:
        labels (np.ndarray): Class labels.
        k (int): Number of folds.
        rng (np.random.Generator): Shuffle stream.
        stratified (bool, optional): Deal classes separately. Defaults to True.

    Returns:
        np.ndarray: Fold index per row.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise StratificationError(f"Cross-validation needs at least 2 folds, got {k}.")
    folds = np.empty(len(labels), dtype=np.int64)

    if not stratified:
        if len(labels) < k:
            raise StratificationError(f"Cannot split {len(labels)} rows into {k} folds.")
        folds[rng.permutation(len(labels))] = np.arange(len(labels)) % k
        return folds

    offset = 0
    for label in np.unique(labels):
        rows = np.flatnonzero(labels == label)
        if len(rows) < k:
            raise StratificationError(f"Class {label} has {len(rows)} rows, fewer than {k} folds.")
        folds[rng.permutation(rows)] = (offset + np.arange(len(rows))) % k
        offset += len(rows)
    return folds


def stratified_sample(labels: np.ndarray, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """
    Row indices of a class-stratified random sample, in ascending order.
    Every class keeps at least one row.
    """
    labels = np.asarray(labels)
    if fraction >= 1:
        return np.arange(len(labels))
    chosen = []
    for label in np.unique(labels):
        rows = np.flatnonzero(labels == label)
        size = max(1, int(round(fraction * len(rows))))
        chosen.append(rng.choice(rows, size=size, replace=False))
    return np.sort(np.concatenate(chosen))

# - - - - - - - - - - - - - - - - - - -
# CROSS-VALIDATION

def evaluate_fold(kind: str, features: FeatureSet, test_mask: np.ndarray, hyperparams, seed: int, positive_label: int) -> ConfusionMatrix:
    model = fit(kind, features.subset(np.flatnonzero(~test_mask)), hyperparams, seed)
    test = features.subset(np.flatnonzero(test_mask))
    return confusion(test.y, predict_batch(model, test.X), positive_label)


def summarize_cv(learner: str, fold_confusions: list[list[ConfusionMatrix]], *, pooled: bool = False) -> CvResult:
    """
    Aggregate per-(run, fold) confusion matrices.

    A run's metrics are the mean of its fold metrics, or the metrics of its
    pooled confusion matrix when pooled is set. The best run has the highest
    F-score, ties broken by accuracy then by run order.

    Args:
        learner (str): Learner kind.
        fold_confusions (list[list[ConfusionMatrix]]): Confusions by run, then fold.
        pooled (bool, optional): Pool counts within a run. Defaults to False.

    Returns:
        CvResult: Aggregated result.
    """
    fold_reports = [[metrics(cm) for cm in run] for run in fold_confusions]
    if pooled:
        run_means = [metrics(sum(run[1:], run[0])) for run in fold_confusions]
    else:
        run_means = [mean_report(run) for run in fold_reports]

    best_run = 0
    for index, report in enumerate(run_means):
        best = run_means[best_run]
        if (report.f1, report.accuracy) > (best.f1, best.accuracy):
            best_run = index

    return CvResult(
        learner=learner,
        runs=len(fold_confusions),
        folds=len(fold_confusions[0]) if fold_confusions else 0,
        fold_confusions=fold_confusions,
        fold_reports=fold_reports,
        run_means=run_means,
        average=mean_report(run_means),
        best_run=best_run,
    )


def fold_assignments(labels: np.ndarray, k: int, runs: int, rng_seed: int, *, stratified: bool = True) -> list[np.ndarray]:
    """
    Fold indices for every run, drawn from one stream so learners evaluated
    with the same seed share their folds.
    """
    rng = np.random.default_rng(rng_seed)
    return [stratified_folds(labels, k, rng, stratified=stratified) for _ in range(runs)]


def cross_validate(
        dataset: LabeledDataset | FeatureSet,
        kind: str,
        hyperparams: dict | Hyperparams | None = None,
        k: int = 10,
        runs: int = 10,
        rng_seed: int = 0,
        *,
        stratified: bool = True,
        pooled: bool = False,
        positive_label: int = ABSENT,
        weekday_encoding: str = "ordinal",
        workers: int = 1,
    ) -> CvResult:
    """
    Repeated k-fold cross-validation of one learner.

    Args:
        dataset (LabeledDataset | FeatureSet): Rows to evaluate on.
        kind (str): Learner kind.
        hyperparams (dict | Hyperparams | None, optional): Hyperparameters. Defaults to None.
        k (int, optional): Folds per run. Defaults to 10.
        runs (int, optional): Repetitions. Defaults to 10.
        rng_seed (int, optional): Seed for folds and training. Defaults to 0.
        stratified (bool, optional): Stratify folds by class. Defaults to True.
        pooled (bool, optional): Pool confusion counts within a run. Defaults to False.
        positive_label (int, optional): Positive class. Defaults to ABSENT.
        weekday_encoding (str, optional): Weekday encoding for datasets. Defaults to "ordinal".
        workers (int, optional): Parallel folds. Defaults to 1.

    Returns:
        CvResult: Per-fold, per-run and aggregated metrics.
    """
    features = dataset.features(weekday_encoding) if isinstance(dataset, LabeledDataset) else dataset
    assignments = fold_assignments(features.y, k, runs, rng_seed, stratified=stratified)

    tasks = [(run, fold) for run in range(runs) for fold in range(k)]
    confusions = Parallel(n_jobs=workers, prefer="threads")(
        delayed(evaluate_fold)(
            kind, features, assignments[run] == fold, hyperparams,
            derive_seed(rng_seed, f"fit:{kind}:{run}:{fold}"), positive_label,
        )
        for run, fold in tasks
    )
    fold_confusions = [confusions[run * k:(run + 1) * k] for run in range(runs)]

    result = summarize_cv(kind, fold_confusions, pooled=pooled)
    logger.info(f"{kind}: {runs}x{k}-fold CV average F1 {result.average.f1:.4f}, best run F1 {result.best.f1:.4f}")
    return result
