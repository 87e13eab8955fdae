'''
Module for naive Bayes with kernel density estimates on numeric features.

Created on 19-10-2026
@author: Harry New

'''
import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import logsumexp
from scipy.stats import norm

from app.learners.base import Hyperparams, Model
from app.models import FeatureSet, PRESENT

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

MIN_BANDWIDTH = 1e-3

# - - - - - - - - - - - - - - - - - - -

class KdeNbHyperparams(Hyperparams):
    bandwidth_mode: Literal["silverman", "scott"] = "silverman"
    bandwidth_scale: float = Field(default=1.0, gt=0)
    # Additive smoothing for categorical likelihoods.
    smoothing: float = Field(default=1.0, gt=0)


class KernelDensity(BaseModel):
    """
    Gaussian kernel density over the distinct training values of one class.
    """
    support: list[float]
    weights: list[int]
    bandwidth: float

    def log_density(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        distinct, inverse = np.unique(x, return_inverse=True)
        log_kernels = norm.logpdf(distinct[:, None], loc=np.asarray(self.support)[None, :], scale=self.bandwidth)
        log_weights = np.log(np.asarray(self.weights, dtype=np.float64)) - np.log(sum(self.weights))
        return logsumexp(log_kernels + log_weights[None, :], axis=1)[inverse.reshape(-1)]


class CategoricalLikelihood(BaseModel):
    """
    Smoothed value frequencies of one class. Values outside the training
    range get the smoothed mass of an unseen value.
    """
    log_probs: list[float]
    log_unseen: float

    def log_density(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        table = np.asarray(self.log_probs)
        inside = (x >= 0) & (x < len(table))
        out = np.full(len(x), self.log_unseen)
        out[inside] = table[x[inside]]
        return out


class ClassModel(BaseModel):
    label: int
    log_prior: float
    features: list[KernelDensity | CategoricalLikelihood]


class KdeNbModel(Model):
    kind: Literal["kde_nb"] = "kde_nb"
    classes: list[ClassModel]

    def log_joint(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        joint = np.empty((len(X), len(self.classes)))
        for c, model in enumerate(self.classes):
            joint[:, c] = model.log_prior + sum(
                likelihood.log_density(X[:, j]) for j, likelihood in enumerate(model.features)
            )
        return joint

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """
        Posterior over [present, absent] per row; rows sum to one.
        """
        joint = self.log_joint(X)
        posterior = np.exp(joint - logsumexp(joint, axis=1, keepdims=True))
        out = np.zeros((len(joint), 2))
        for c, model in enumerate(self.classes):
            out[:, model.label] = posterior[:, c]
        return out

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        proba = self.predict_proba(X)
        return (proba[:, 1] > proba[:, 0]).astype(np.int64)

# - - - - - - - - - - - - - - - - - - -

def bandwidth(values: np.ndarray, mode: str = "silverman", scale: float = 1.0) -> float:
    """
    Rule-of-thumb kernel bandwidth.

    Args:
        values (np.ndarray): Sample.
        mode (str, optional): "silverman" or "scott". Defaults to "silverman".
        scale (float, optional): Multiplier. Defaults to 1.0.

    Returns:
        float: Bandwidth, never below MIN_BANDWIDTH.
    """
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    if n < 2:
        return max(scale, MIN_BANDWIDTH)
    sd = float(np.std(values, ddof=1))
    if mode == "scott":
        h = 1.06 * sd * n ** (-1 / 5)
    else:
        q75, q25 = np.percentile(values, [75, 25])
        spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
        h = 0.9 * spread * n ** (-1 / 5)
    return max(h * scale, MIN_BANDWIDTH)


def _fit_feature(column: np.ndarray, numeric: bool, size: int, hp: KdeNbHyperparams) -> KernelDensity | CategoricalLikelihood:
    if numeric:
        support, weights = np.unique(column, return_counts=True)
        return KernelDensity(
            support=support.astype(float).tolist(),
            weights=weights.tolist(),
            bandwidth=bandwidth(column, hp.bandwidth_mode, hp.bandwidth_scale),
        )
    counts = np.bincount(column, minlength=size)[:size].astype(np.float64)
    total = counts.sum() + hp.smoothing * (size + 1)
    return CategoricalLikelihood(
        log_probs=np.log((counts + hp.smoothing) / total).tolist(),
        log_unseen=float(np.log(hp.smoothing / total)),
    )


def fit_kde_nb(features: FeatureSet, hp: KdeNbHyperparams, seed: int) -> KdeNbModel:
    """
    Train kernel density naive Bayes.

    Args:
        features (FeatureSet): Training data.
        hp (KdeNbHyperparams): Hyperparameters.
        seed (int): Seed, recorded only; training is deterministic.

    Returns:
        KdeNbModel: Trained model.
    """
    X, y = features.X, features.y
    sizes = [int(X[:, j].max()) + 1 if len(X) else 1 for j in range(X.shape[1])]
    labels = np.unique(y) if len(y) else np.array([PRESENT])
    classes = []
    for label in labels:
        rows = X[y == label]
        classes.append(ClassModel(
            label=int(label),
            log_prior=float(np.log(len(rows) / len(y))) if len(y) else 0.0,
            features=[
                _fit_feature(rows[:, j], features.numeric[j], sizes[j], hp)
                for j in range(X.shape[1])
            ],
        ))
    logger.debug(f"KDE naive Bayes trained on {len(y)} rows, {len(classes)} classes.")
    return KdeNbModel(
        hyperparams=hp.model_dump(),
        seed=seed,
        feature_names=features.names,
        numeric=features.numeric,
        classes=classes,
    )
