'''
Module for the feed-forward networks: the multilayer perceptron and the deep network.

Created on 19-10-2026
@author: Harry New

'''
import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from app.core.errors import DivergenceError
from app.learners.base import Hyperparams, Model, class_counts
from app.models import FeatureSet

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

class NetworkHyperparams(Hyperparams):
    layer_sizes: list[int] = Field(default_factory=lambda: [32, 16], min_length=1)
    learning_rate: float = Field(default=1e-3, ge=0)
    epochs: int = Field(default=50, ge=1)
    batch_size: int = Field(default=256, ge=1)
    l2: float = Field(default=0.0, ge=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)


class MlpHyperparams(NetworkHyperparams):
    layer_sizes: list[int] = Field(default_factory=lambda: [32, 16], min_length=1, max_length=10)


class DeepHyperparams(NetworkHyperparams):
    layer_sizes: list[int] = Field(default_factory=lambda: [64, 64, 32, 32, 16], min_length=1, max_length=32)
    epochs: int = Field(default=30, ge=1)


class NetworkState(BaseModel):
    """
    Weights and optimizer moments of a network under training.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    m_weights: list[np.ndarray]
    v_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_biases: list[np.ndarray]
    step: int = 0


class NetworkModel(Model):
    kind: Literal["mlp", "deep_nn"]
    mean: list[float]
    scale: list[float]
    weights: list[list[list[float]]]
    biases: list[list[float]]
    # Set when training saw a single class.
    constant: Optional[int] = None

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.constant is not None:
            absent = np.full(len(X), float(self.constant))
        else:
            inputs = (X - np.asarray(self.mean)) / np.asarray(self.scale)
            weights = [np.asarray(w) for w in self.weights]
            biases = [np.asarray(b) for b in self.biases]
            absent = forward(weights, biases, inputs)[-1][:, 0]
        return np.column_stack([1 - absent, absent])

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] > 0.5).astype(np.int64)

# - - - - - - - - - - - - - - - - - - -
# FORWARD AND BACKWARD PASSES

def forward(weights: list[np.ndarray], biases: list[np.ndarray], X: np.ndarray) -> list[np.ndarray]:
    """
    Activations of every layer: ReLU hidden layers and a sigmoid output.

    Args:
        weights (list[np.ndarray]): Layer weights, (fan_in, fan_out) each.
        biases (list[np.ndarray]): Layer biases.
        X (np.ndarray): Standardized inputs.

    Returns:
        list[np.ndarray]: Input followed by each layer's output.
    """
    activations = [X]
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = activations[-1] @ w + b
        activations.append(expit(z) if i == len(weights) - 1 else np.maximum(z, 0.0))
    return activations


def loss_and_gradients(weights: list[np.ndarray], biases: list[np.ndarray], X: np.ndarray, y: np.ndarray, l2: float = 0.0) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """
    Mean binary cross-entropy plus an L2 penalty on the weights, with gradients.

    Args:
        weights (list[np.ndarray]): Layer weights.
        biases (list[np.ndarray]): Layer biases.
        X (np.ndarray): Standardized inputs.
        y (np.ndarray): Labels in {0, 1}.
        l2 (float, optional): Penalty strength. Defaults to 0.0.

    Returns:
        tuple[float, list[np.ndarray], list[np.ndarray]]: Loss, weight and bias gradients.
    """
    n = len(y)
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    activations = [X]
    pre = []
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = activations[-1] @ w + b
        pre.append(z)
        activations.append(expit(z) if i == len(weights) - 1 else np.maximum(z, 0.0))

    logits = pre[-1]
    # log(1 + e^z) - y z, written to stay finite for large |z|.
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))
    loss += 0.5 * l2 * sum(float(np.sum(w * w)) for w in weights)

    grad_w = [np.empty_like(w) for w in weights]
    grad_b = [np.empty_like(b) for b in biases]
    delta = (activations[-1] - y) / n
    for i in range(len(weights) - 1, -1, -1):
        grad_w[i] = activations[i].T @ delta + l2 * weights[i]
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * (pre[i - 1] > 0)
    return loss, grad_w, grad_b


def mlp_backprop_step(state: NetworkState, X: np.ndarray, y: np.ndarray, hp: NetworkHyperparams) -> tuple[NetworkState, float]:
    """
    One Adam update on a mini-batch.

    Args:
        state (NetworkState): Current weights and moments, left untouched.
        X (np.ndarray): Standardized batch inputs.
        y (np.ndarray): Batch labels.
        hp (NetworkHyperparams): Optimizer settings.

    Returns:
        tuple[NetworkState, float]: Updated state and the batch loss before the update.
    """
    loss, grad_w, grad_b = loss_and_gradients(state.weights, state.biases, X, y, hp.l2)
    if not np.isfinite(loss):
        raise DivergenceError(
            f"Network loss became non-finite at step {state.step + 1}; try a lower learning_rate than {hp.learning_rate}."
        )

    step = state.step + 1
    correction1 = 1 - hp.beta1 ** step
    correction2 = 1 - hp.beta2 ** step

    def adam(params, grads, m_prev, v_prev):
        new_params, new_m, new_v = [], [], []
        for p, g, m, v in zip(params, grads, m_prev, v_prev):
            m = hp.beta1 * m + (1 - hp.beta1) * g
            v = hp.beta2 * v + (1 - hp.beta2) * g * g
            update = hp.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + hp.epsilon)
            new_params.append(p - update)
            new_m.append(m)
            new_v.append(v)
        return new_params, new_m, new_v

    weights, m_w, v_w = adam(state.weights, grad_w, state.m_weights, state.v_weights)
    biases, m_b, v_b = adam(state.biases, grad_b, state.m_biases, state.v_biases)
    return NetworkState(
        weights=weights, biases=biases,
        m_weights=m_w, v_weights=v_w,
        m_biases=m_b, v_biases=v_b,
        step=step,
    ), loss

# - - - - - - - - - - - - - - - - - - -

def init_state(layer_sizes: list[int], n_inputs: int, rng: np.random.Generator) -> NetworkState:
    """
    Uniform fan-in initialization of a network with one sigmoid output.
    """
    sizes = [n_inputs, *layer_sizes, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = 1 / np.sqrt(fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return NetworkState(
        weights=weights, biases=biases,
        m_weights=[np.zeros_like(w) for w in weights],
        v_weights=[np.zeros_like(w) for w in weights],
        m_biases=[np.zeros_like(b) for b in biases],
        v_biases=[np.zeros_like(b) for b in biases],
    )


def fit_network(features: FeatureSet, hp: NetworkHyperparams, seed: int, *, kind: str = "mlp") -> NetworkModel:
    """
    Train a network by mini-batch Adam on standardized inputs.

    Args:
        features (FeatureSet): Training data.
        hp (NetworkHyperparams): Hyperparameters.
        seed (int): Seed for initialization and batch order.
        kind (str, optional): "mlp" or "deep_nn". Defaults to "mlp".

    Returns:
        NetworkModel: Trained network.
    """
    X = features.X.astype(np.float64)
    y = features.y
    mean = X.mean(axis=0) if len(X) else np.zeros(X.shape[1])
    scale = X.std(axis=0) if len(X) else np.ones(X.shape[1])
    scale = np.where(scale > 0, scale, 1.0)

    counts = class_counts(y)
    constant = None
    if min(counts) == 0:
        constant = 1 if counts[1] > 0 else 0

    rng = np.random.default_rng(seed)
    state = init_state(hp.layer_sizes, X.shape[1], rng)
    if constant is None:
        inputs = (X - mean) / scale
        for epoch in range(hp.epochs):
            order = rng.permutation(len(y))
            losses = []
            for start in range(0, len(y), hp.batch_size):
                batch = order[start:start + hp.batch_size]
                state, loss = mlp_backprop_step(state, inputs[batch], y[batch], hp)
                losses.append(loss)
            logger.debug(f"{kind} epoch {epoch + 1}/{hp.epochs}: mean loss {np.mean(losses):.5f}")

    return NetworkModel(
        kind=kind,
        hyperparams=hp.model_dump(),
        seed=seed,
        feature_names=features.names,
        numeric=features.numeric,
        mean=mean.tolist(),
        scale=scale.tolist(),
        weights=[w.tolist() for w in state.weights],
        biases=[b.tolist() for b in state.biases],
        constant=constant,
    )
