'''
Module for the learner registry: training, prediction and model files.

Created on 19-10-2026
@author: Harry New

'''
import json
import logging
from pathlib import Path
from typing import Annotated, Any, Union

import numpy as np
from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from app.core.errors import AbsenceError, EmptyDatasetError, EncodingError, HyperparamError
from app.learners.base import Hyperparams, Model, validate_hyperparams
from app.learners.c45 import C45Hyperparams, C45Model, fit_c45
from app.learners.decision_table import DecisionTableHyperparams, DecisionTableModel, fit_decision_table
from app.learners.forest import ForestHyperparams, ForestModel, fit_forest
from app.learners.kde_nb import KdeNbHyperparams, KdeNbModel, fit_kde_nb
from app.learners.network import DeepHyperparams, MlpHyperparams, NetworkModel, fit_network
from app.models import APPLIANCES, FEATURE_COLUMNS, FeatureRow, FeatureSet, LabeledDataset, LEARNER_KINDS

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1

HYPERPARAMS: dict[str, type[Hyperparams]] = {
    "decision_table": DecisionTableHyperparams,
    "c45": C45Hyperparams,
    "random_forest": ForestHyperparams,
    "kde_nb": KdeNbHyperparams,
    "mlp": MlpHyperparams,
    "deep_nn": DeepHyperparams,
}

AnyModel = Annotated[
    Union[DecisionTableModel, C45Model, ForestModel, KdeNbModel, NetworkModel],
    Field(discriminator="kind"),
]
_model_adapter = TypeAdapter(AnyModel)

# Inclusive value bounds of the dataset columns; other names are not checked.
FEATURE_RANGES: dict[str, tuple[int, int]] = {
    **{appliance: (0, 1) for appliance in APPLIANCES},
    "time_slot": (0, 1439),
    "weekday": (0, 6),
    "day": (1, 31),
    "month": (1, 12),
    **{f"weekday_{weekday}": (0, 1) for weekday in range(7)},
}

# - - - - - - - - - - - - - - - - - - -
# HYPERPARAMETERS

def _check_kind(kind: str) -> None:
    if kind not in LEARNER_KINDS:
        raise HyperparamError(f"Unknown learner kind {kind!r}; expected one of {list(LEARNER_KINDS)}.")


def hyperparams_from_candidate(kind: str, candidate: dict[str, Any] | None) -> Hyperparams:
    """
    Build validated hyperparameters from a raw mapping or a tuning candidate.
    Network candidates may give hidden_layers and layer_width instead of layer_sizes.

    Args:
        kind (str): Learner kind.
        candidate (dict | None): Raw values.

    Returns:
        Hyperparams: Validated hyperparameters.
    """
    _check_kind(kind)
    values = dict(candidate or {})
    if "hidden_layers" in values or "layer_width" in values:
        schema = HYPERPARAMS[kind]
        default_sizes = schema.model_fields["layer_sizes"].default_factory() if "layer_sizes" in schema.model_fields else [1]
        layers = int(values.pop("hidden_layers", len(default_sizes)))
        width = int(values.pop("layer_width", default_sizes[0]))
        values["layer_sizes"] = [width] * layers
    return validate_hyperparams(HYPERPARAMS[kind], values)

# - - - - - - - - - - - - - - - - - - -
# TRAINING AND PREDICTION

def fit(
        kind: str,
        data: LabeledDataset | FeatureSet,
        hyperparams: dict | Hyperparams | None = None,
        rng_seed: int = 0,
        *,
        workers: int = 1,
        weekday_encoding: str = "ordinal",
    ) -> Model:
    """
    Train one learner.

    Args:
        kind (str): Learner kind.
        data (LabeledDataset | FeatureSet): Training rows.
        hyperparams (dict | Hyperparams | None, optional): Hyperparameters, None for defaults.
        rng_seed (int, optional): Seed. Defaults to 0.
        workers (int, optional): Parallel workers for the forest. Defaults to 1.
        weekday_encoding (str, optional): Encoding used when data is a dataset. Defaults to "ordinal".

    Returns:
        Model: Trained model.
    """
    _check_kind(kind)
    hp = hyperparams if isinstance(hyperparams, HYPERPARAMS[kind]) else hyperparams_from_candidate(
        kind, hyperparams.model_dump() if isinstance(hyperparams, BaseModel) else hyperparams
    )
    features = data.features(weekday_encoding) if isinstance(data, LabeledDataset) else data
    if len(features) == 0:
        raise EmptyDatasetError(f"Cannot train {kind} on an empty dataset.")

    if kind == "decision_table":
        return fit_decision_table(features, hp, rng_seed)
    if kind == "c45":
        return fit_c45(features, hp, rng_seed)
    if kind == "random_forest":
        return fit_forest(features, hp, rng_seed, workers=workers)
    if kind == "kde_nb":
        return fit_kde_nb(features, hp, rng_seed)
    return fit_network(features, hp, rng_seed, kind=kind)


def encode_row(row: FeatureRow | dict, feature_names: list[str]) -> np.ndarray:
    """
    Encode one feature row in the column layout a model was trained on.

    Args:
        row (FeatureRow | dict): Row, validated if given as a mapping.
        feature_names (list[str]): Model feature names.

    Returns:
        np.ndarray: Encoded row, shape (1, d).
    """
    if not isinstance(row, FeatureRow):
        try:
            row = FeatureRow.model_validate(row)
        except ValidationError as err:
            raise EncodingError(f"Feature row cannot be encoded: {err}") from err
    values = dict(zip(FEATURE_COLUMNS, row.to_vector()))
    for weekday in range(7):
        values[f"weekday_{weekday}"] = int(row.weekday == weekday)
    try:
        return np.array([[values[name] for name in feature_names]], dtype=np.int64)
    except KeyError as err:
        raise EncodingError(f"Model expects unknown feature {err.args[0]!r}.") from err


def _check_ranges(X: np.ndarray, feature_names: list[str]) -> None:
    for column, name in enumerate(feature_names):
        if name not in FEATURE_RANGES:
            continue
        low, high = FEATURE_RANGES[name]
        bad = (X[:, column] < low) | (X[:, column] > high)
        if bad.any():
            row = int(np.argmax(bad))
            raise EncodingError(f"Row {row}: {name} = {X[row, column]} is outside [{low}, {high}].")


def predict(model: Model, row: FeatureRow | dict) -> int:
    """
    Predict one row: 0 present, 1 absent.
    """
    return int(model.predict_batch(encode_row(row, model.feature_names))[0])


def predict_batch(model: Model, X: np.ndarray | FeatureSet | LabeledDataset, *, weekday_encoding: str = "ordinal") -> np.ndarray:
    """
    Predict many rows at once.

    Args:
        model (Model): Trained model.
        X (np.ndarray | FeatureSet | LabeledDataset): Rows in the model's layout.
        weekday_encoding (str, optional): Encoding used when X is a dataset. Defaults to "ordinal".

    Returns:
        np.ndarray: Predicted labels.
    """
    if isinstance(X, LabeledDataset):
        X = X.features(weekday_encoding)
    if isinstance(X, FeatureSet):
        X = X.X
    X = np.asarray(X, dtype=np.int64)
    if X.ndim != 2 or X.shape[1] != len(model.feature_names):
        raise EncodingError(f"Expected rows of {len(model.feature_names)} features, got shape {X.shape}.")
    _check_ranges(X, model.feature_names)
    return model.predict_batch(X)

# - - - - - - - - - - - - - - - - - - -
# MODEL FILES

def save_model(model: Model, path: Path) -> Path:
    """
    Write a model as a versioned JSON envelope.

    Args:
        model (Model): Trained model.
        path (Path): Destination file.

    Returns:
        Path: Written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    envelope = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "model": model.model_dump(mode="json"),
    }
    path.write_text(json.dumps(envelope), encoding="utf-8")
    logger.info(f"Saved {model.kind} model to {path}.")
    return path


def load_model(path: Path) -> Model:
    """
    Read a model written by save_model.
    """
    try:
        envelope = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise AbsenceError(f"Cannot read model file {path}: {err}") from err
    if envelope.get("format_version") != MODEL_FORMAT_VERSION:
        raise AbsenceError(f"Unsupported model format version {envelope.get('format_version')!r} in {path}.")
    try:
        return _model_adapter.validate_python(envelope["model"])
    except (KeyError, ValidationError) as err:
        raise AbsenceError(f"Model file {path} is invalid: {err}") from err
