'''
Module for the decision table majority classifier.

Created on 19-10-2026
@author: Harry New

'''
import heapq
import logging
from typing import Literal

import numpy as np
from pydantic import Field

from app.learners.base import Hyperparams, Model, class_counts, majority
from app.models import FeatureSet

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

class DecisionTableHyperparams(Hyperparams):
    # Expansions without improvement before the search stops.
    stale_limit: int = Field(default=5, ge=1, le=50)


class DecisionTableModel(Model):
    kind: Literal["decision_table"] = "decision_table"
    selected: list[int]
    # One entry per observed key: key values followed by the class.
    entries: list[list[int]]
    default_class: int

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        table = {tuple(entry[:-1]): entry[-1] for entry in self.entries}
        keys = X[:, self.selected] if self.selected else np.zeros((len(X), 0), dtype=np.int64)
        return np.array(
            [table.get(tuple(key), self.default_class) for key in keys.tolist()],
            dtype=np.int64,
        )

# - - - - - - - - - - - - - - - - - - -

def _group_counts(X: np.ndarray, y: np.ndarray, subset: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if subset:
        keys, inverse = np.unique(X[:, list(subset)], axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
    else:
        keys, inverse = np.zeros((1, 0), dtype=np.int64), np.zeros(len(y), dtype=np.int64)
    counts = np.zeros((len(keys), 2), dtype=np.int64)
    np.add.at(counts, (inverse, y), 1)
    return keys, inverse, counts


def loo_accuracy(X: np.ndarray, y: np.ndarray, subset: tuple[int, ...]) -> float:
    """
    Leave-one-out accuracy of the table keyed on a feature subset. A row whose
    key has no other rows falls back to the global majority without it.

    Args:
        X (np.ndarray): Training rows.
        y (np.ndarray): Training labels.
        subset (tuple[int, ...]): Key features.

    Returns:
        float: Accuracy in [0, 1].
    """
    if len(y) == 0:
        return 0.0
    _, inverse, counts = _group_counts(X, y, subset)
    rows = np.arange(len(y))
    own = counts[inverse]
    own[rows, y] -= 1
    others = np.asarray(class_counts(y))[None, :].repeat(len(y), axis=0)
    others[rows, y] -= 1

    local = (own[:, 1] > own[:, 0]).astype(np.int64)
    fallback = (others[:, 1] > others[:, 0]).astype(np.int64)
    predicted = np.where(own.sum(axis=1) > 0, local, fallback)
    return float(np.mean(predicted == y))


def select_features(X: np.ndarray, y: np.ndarray, stale_limit: int = 5) -> tuple[tuple[int, ...], float]:
    """
    Best-first forward search over feature subsets. Ties prefer the smaller
    subset, then the lexicographically smaller one.

    Args:
        X (np.ndarray): Training rows.
        y (np.ndarray): Training labels.
        stale_limit (int, optional): Non-improving expansions allowed. Defaults to 5.

    Returns:
        tuple[tuple[int, ...], float]: Selected subset and its accuracy.
    """
    d = X.shape[1]
    best_subset: tuple[int, ...] = ()
    best_score = loo_accuracy(X, y, best_subset)
    frontier = [(-best_score, 0, best_subset)]
    visited = {best_subset}
    stale = 0

    while frontier and stale < stale_limit:
        _, _, subset = heapq.heappop(frontier)
        improved = False
        for feature in range(d):
            if feature in subset:
                continue
            child = tuple(sorted(subset + (feature,)))
            if child in visited:
                continue
            visited.add(child)
            score = loo_accuracy(X, y, child)
            heapq.heappush(frontier, (-score, len(child), child))
            if score > best_score + 1e-12:
                best_subset, best_score = child, score
                improved = True
        stale = 0 if improved else stale + 1

    return best_subset, best_score


def fit_decision_table(features: FeatureSet, hp: DecisionTableHyperparams, seed: int) -> DecisionTableModel:
    """
    Train a decision table.

    Args:
        features (FeatureSet): Training data.
        hp (DecisionTableHyperparams): Hyperparameters.
        seed (int): Seed, recorded only; the search is deterministic.

    Returns:
        DecisionTableModel: Trained table.
    """
    X, y = features.X, features.y
    subset, score = select_features(X, y, hp.stale_limit)
    keys, _, counts = _group_counts(X, y, subset)
    entries = [
        [int(value) for value in key] + [majority(count)]
        for key, count in zip(keys.tolist(), counts.tolist())
    ]
    logger.debug(f"Decision table selected {[features.names[i] for i in subset]} (LOO accuracy {score:.4f}).")
    return DecisionTableModel(
        hyperparams=hp.model_dump(),
        seed=seed,
        feature_names=features.names,
        numeric=features.numeric,
        selected=list(subset),
        entries=entries,
        default_class=majority(class_counts(y)),
    )
