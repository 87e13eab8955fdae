'''
Module for C4.5 tree induction and pessimistic post-pruning.

Created on 19-10-2026
@author: Harry New

'''
import logging
import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy.stats import norm

from app.learners.base import Hyperparams, Model, class_counts, majority
from app.models import FeatureSet

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# Splits whose gain differs by less than this are treated as equal.
GAIN_TOLERANCE = 1e-12

# - - - - - - - - - - - - - - - - - - -

class C45Hyperparams(Hyperparams):
    criterion: Literal["gain", "gain_ratio"] = "gain"
    min_leaf: int = Field(default=2, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1)
    prune: bool = True
    pruning_confidence: float = Field(default=0.25, gt=0, le=0.5)
    zero_gain_splits: bool = True


class TreeNode(BaseModel):
    """
    Tree node. Leaves have no children; internal nodes split on one feature,
    either by equality (one child per value) or by threshold (left: x <= threshold).
    """
    counts: list[int]
    feature: Optional[int] = None
    split: Optional[Literal["equality", "threshold"]] = None
    threshold: Optional[float] = None
    values: list[int] = Field(default_factory=list)
    children: list["TreeNode"] = Field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def prediction(self) -> int:
        return majority(self.counts)

    @property
    def support(self) -> int:
        return sum(self.counts)

    @property
    def errors(self) -> int:
        return self.support - self.counts[self.prediction]

    def node_count(self) -> int:
        return 1 + sum(child.node_count() for child in self.children)

    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + max(child.depth() for child in self.children)

    def leaves(self) -> list["TreeNode"]:
        if self.is_leaf:
            return [self]
        return [leaf for child in self.children for leaf in child.leaves()]


class C45Model(Model):
    kind: Literal["c45"] = "c45"
    root: TreeNode

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return predict_tree(self.root, np.asarray(X))

# - - - - - - - - - - - - - - - - - - -
# SPLIT SELECTION

def entropy(counts: np.ndarray) -> np.ndarray:
    """
    Entropy in bits of each row of class counts.
    """
    counts = np.atleast_2d(np.asarray(counts, dtype=np.float64))
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / totals, 0.0)
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return terms.sum(axis=1)


class Split(BaseModel):
    feature: int
    kind: Literal["equality", "threshold"]
    gain: float
    score: float
    threshold: Optional[float] = None
    values: list[int] = Field(default_factory=list)


def _feature_split(x: np.ndarray, y: np.ndarray, feature: int, numeric: bool, min_leaf: int, criterion: str, parent_entropy: float) -> Split | None:
    size = int(x.max()) + 1
    counts = np.bincount(x * 2 + y, minlength=2 * size).reshape(size, 2)
    present = np.flatnonzero(counts.sum(axis=1))
    if len(present) < 2:
        return None
    counts = counts[present]
    n = counts.sum()

    if numeric:
        left = np.cumsum(counts, axis=0)[:-1]
        right = counts.sum(axis=0) - left
        n_left = left.sum(axis=1)
        n_right = right.sum(axis=1)
        valid = (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            return None
        conditional = (n_left * entropy(left) + n_right * entropy(right)) / n
        gains = parent_entropy - conditional
        scores = gains
        if criterion == "gain_ratio":
            split_info = entropy(np.column_stack([n_left, n_right]))
            scores = np.divide(gains, split_info, out=np.zeros_like(gains), where=split_info > 0)
        scores = np.where(valid, scores, -np.inf)
        best = int(np.argmax(scores))
        return Split(
            feature=feature, kind="threshold",
            gain=float(gains[best]), score=float(scores[best]),
            threshold=(present[best] + present[best + 1]) / 2,
        )

    sizes = counts.sum(axis=1)
    if (sizes < min_leaf).any():
        return None
    gain = parent_entropy - float((sizes * entropy(counts)).sum() / n)
    score = gain
    if criterion == "gain_ratio":
        split_info = float(entropy(sizes[None, :])[0])
        score = gain / split_info if split_info > 0 else 0.0
    return Split(feature=feature, kind="equality", gain=gain, score=score, values=present.tolist())


def best_split(X: np.ndarray, y: np.ndarray, numeric: list[bool], *, min_leaf: int = 2, criterion: str = "gain", features: Optional[np.ndarray] = None) -> Split | None:
    """
    Best split of a node over the candidate features.

    Numeric features are cut at midpoints between consecutive distinct values;
    the others split by equality. Ties keep the lowest feature index and the
    lowest threshold.

    Args:
        X (np.ndarray): Node rows, non-negative integer codes.
        y (np.ndarray): Node labels.
        numeric (list[bool]): Numeric flag per feature.
        min_leaf (int, optional): Minimum rows per child. Defaults to 2.
        criterion (str, optional): "gain" or "gain_ratio". Defaults to "gain".
        features (np.ndarray | None, optional): Candidate features. Defaults to all.

    Returns:
        Split | None: Best split or None if no valid split exists.
    """
    parent_entropy = float(entropy(class_counts(y))[0])
    candidates = range(X.shape[1]) if features is None else features
    best = None
    for feature in candidates:
        split = _feature_split(X[:, feature], y, int(feature), numeric[feature], min_leaf, criterion, parent_entropy)
        if split is None:
            continue
        if best is None or split.score > best.score + GAIN_TOLERANCE:
            best = split
    return best

# - - - - - - - - - - - - - - - - - - -
# INDUCTION

def grow_tree(
        X: np.ndarray,
        y: np.ndarray,
        numeric: list[bool],
        hp: C45Hyperparams,
        *,
        max_features: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
        depth: int = 0,
    ) -> TreeNode:
    """
    Grow an unpruned tree by recursive information-gain splits.

    Args:
        X (np.ndarray): Training rows.
        y (np.ndarray): Training labels.
        numeric (list[bool]): Numeric flag per feature.
        hp (C45Hyperparams): Tree hyperparameters.
        max_features (int | None, optional): Features drawn per node; None uses all.
        rng (np.random.Generator | None, optional): Stream for feature draws.
        depth (int, optional): Current depth.

    Returns:
        TreeNode: Grown tree.
    """
    node = TreeNode(counts=class_counts(y))
    if min(node.counts) == 0 or len(y) < 2 * hp.min_leaf:
        return node
    if hp.max_depth is not None and depth >= hp.max_depth:
        return node

    features = None
    if max_features is not None and max_features < X.shape[1]:
        features = np.sort(rng.choice(X.shape[1], size=max_features, replace=False))

    split = best_split(X, y, numeric, min_leaf=hp.min_leaf, criterion=hp.criterion, features=features)
    if split is None:
        return node
    if split.gain <= GAIN_TOLERANCE and not hp.zero_gain_splits:
        return node

    column = X[:, split.feature]
    if split.kind == "threshold":
        masks = [column <= split.threshold, column > split.threshold]
    else:
        masks = [column == value for value in split.values]

    children = [
        grow_tree(X[mask], y[mask], numeric, hp, max_features=max_features, rng=rng, depth=depth + 1)
        for mask in masks
    ]
    return node.model_copy(update={
        "feature": split.feature,
        "split": split.kind,
        "threshold": split.threshold,
        "values": split.values,
        "children": children,
    })


def predict_tree(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """
    Predict every row of X; values unseen at an equality split take that node's majority.
    """
    out = np.empty(len(X), dtype=np.int64)
    _route(node, X, np.arange(len(X)), out)
    return out


def _route(node: TreeNode, X: np.ndarray, rows: np.ndarray, out: np.ndarray) -> None:
    if len(rows) == 0:
        return
    if node.is_leaf:
        out[rows] = node.prediction
        return
    column = X[rows, node.feature]
    if node.split == "threshold":
        mask = column <= node.threshold
        _route(node.children[0], X, rows[mask], out)
        _route(node.children[1], X, rows[~mask], out)
        return
    routed = np.zeros(len(rows), dtype=bool)
    for value, child in zip(node.values, node.children):
        mask = column == value
        routed |= mask
        _route(child, X, rows[mask], out)
    out[rows[~routed]] = node.prediction

# - - - - - - - - - - - - - - - - - - -
# PRUNING

def pessimistic_errors(total: float, errors: float, confidence: float = 0.25) -> float:
    """
    Extra errors added by the upper confidence bound on a leaf's error rate.

    Args:
        total (float): Rows reaching the leaf.
        errors (float): Misclassified rows.
        confidence (float, optional): Confidence factor. Defaults to 0.25.

    Returns:
        float: Errors to add to the observed count.
    """
    if total <= 0:
        return 0.0
    if errors < 1e-6:
        return total * (1 - math.exp(math.log(confidence) / total))
    if errors < 0.9999:
        base = total * (1 - math.exp(math.log(confidence) / total))
        return base + errors * (pessimistic_errors(total, 1.0, confidence) - base)
    if errors + 0.5 >= total:
        return 0.67 * (total - errors)
    z = float(norm.isf(confidence))
    z2 = z * z
    rate = (
        errors + 0.5 + z2 / 2
        + z * math.sqrt((errors + 0.5) * (1 - (errors + 0.5) / total) + z2 / 4)
    ) / (total + z2)
    return total * rate - errors


def estimated_errors(node: TreeNode, confidence: float = 0.25) -> float:
    if node.is_leaf:
        return node.errors + pessimistic_errors(node.support, node.errors, confidence)
    return sum(estimated_errors(child, confidence) for child in node.children)


def c45_prune(tree: TreeNode, confidence: float = 0.25) -> TreeNode:
    """
    Bottom-up subtree replacement. A subtree becomes a majority leaf when the
    leaf's estimated errors do not exceed the subtree's, or when every leaf
    below it predicts the same class.

    Args:
        tree (TreeNode): Fully grown tree, left untouched.
        confidence (float, optional): Confidence factor. Defaults to 0.25.

    Returns:
        TreeNode: Pruned tree.
    """
    if tree.is_leaf:
        return tree
    node = tree.model_copy(update={"children": [c45_prune(child, confidence) for child in tree.children]})
    leaf = TreeNode(counts=list(tree.counts))

    if len({child.prediction for child in node.leaves()}) == 1:
        return leaf
    leaf_estimate = leaf.errors + pessimistic_errors(leaf.support, leaf.errors, confidence)
    if leaf_estimate <= estimated_errors(node, confidence):
        return leaf
    return node

# - - - - - - - - - - - - - - - - - - -

def fit_c45(features: FeatureSet, hp: C45Hyperparams, seed: int) -> C45Model:
    """
    Train a C4.5 tree.

    Args:
        features (FeatureSet): Training data.
        hp (C45Hyperparams): Hyperparameters.
        seed (int): Seed, recorded only; induction is deterministic.

    Returns:
        C45Model: Trained tree.
    """
    root = grow_tree(features.X, features.y, features.numeric, hp)
    grown = root.node_count()
    if hp.prune:
        root = c45_prune(root, hp.pruning_confidence)
    logger.debug(f"C4.5 tree grown to {grown} nodes, {root.node_count()} after pruning.")
    return C45Model(
        hyperparams=hp.model_dump(),
        seed=seed,
        feature_names=features.names,
        numeric=features.numeric,
        root=root,
    )
