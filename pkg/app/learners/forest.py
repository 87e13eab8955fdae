'''
Module for the random forest of C4.5 trees.

Created on 19-10-2026
@author: Harry New

'''
import logging
import math
from typing import Literal, Optional

import numpy as np
from joblib import Parallel, delayed
from pydantic import Field

from app.learners.base import Model
from app.learners.c45 import C45Hyperparams, TreeNode, c45_prune, grow_tree, predict_tree
from app.models import FeatureSet

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

class ForestHyperparams(C45Hyperparams):
    tree_count: int = Field(default=100, ge=1, le=1000)
    # None draws ceil(sqrt(d)) features per node.
    feature_subset_size: Optional[int] = Field(default=None, ge=1)
    bootstrap: bool = True
    prune: bool = False


class ForestModel(Model):
    kind: Literal["random_forest"] = "random_forest"
    trees: list[TreeNode]

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        """
        Majority vote of the members, ties to present.
        """
        X = np.asarray(X)
        votes = np.zeros(len(X), dtype=np.int64)
        for tree in self.trees:
            votes += predict_tree(tree, X)
        return (2 * votes > len(self.trees)).astype(np.int64)

# - - - - - - - - - - - - - - - - - - -

def _fit_member(X: np.ndarray, y: np.ndarray, numeric: list[bool], hp: ForestHyperparams, max_features: int, seed: int) -> TreeNode:
    rng = np.random.default_rng(seed)
    if hp.bootstrap:
        rows = rng.integers(0, len(y), size=len(y))
        X, y = X[rows], y[rows]
    tree = grow_tree(X, y, numeric, hp, max_features=max_features, rng=rng)
    if hp.prune:
        tree = c45_prune(tree, hp.pruning_confidence)
    return tree


def fit_forest(features: FeatureSet, hp: ForestHyperparams, seed: int, *, workers: int = 1) -> ForestModel:
    """
    Train a random forest. Each member draws its own stream from the seed, so
    the result does not depend on the number of workers.

    Args:
        features (FeatureSet): Training data.
        hp (ForestHyperparams): Hyperparameters.
        seed (int): Seed.
        workers (int, optional): Parallel workers. Defaults to 1.

    Returns:
        ForestModel: Trained forest.
    """
    d = features.X.shape[1]
    max_features = hp.feature_subset_size or math.ceil(math.sqrt(d))
    max_features = min(max_features, d)
    member_seeds = np.random.default_rng(seed).integers(0, 2**63 - 1, size=hp.tree_count)

    trees = Parallel(n_jobs=workers, prefer="threads")(
        delayed(_fit_member)(features.X, features.y, features.numeric, hp, max_features, int(member_seed))
        for member_seed in member_seeds
    )
    logger.debug(f"Random forest trained with {len(trees)} trees, {max_features} features per split.")
    return ForestModel(
        hyperparams=hp.model_dump(),
        seed=seed,
        feature_names=features.names,
        numeric=features.numeric,
        trees=trees,
    )
