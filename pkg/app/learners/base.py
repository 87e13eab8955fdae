'''
Module for the shared learner model contract.

Created on 19-10-2026
@author: Harry New

'''
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from app.core.errors import HyperparamError
from app.models import PRESENT, ABSENT

# - - - - - - - - - - - - - - - - - - -

class Hyperparams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Model(BaseModel):
    """
    Trained classifier. Subclasses hold their parameters as plain data so
    a model serializes to JSON and loads back with identical predictions.
    """
    model_config = ConfigDict(frozen=True)

    kind: str
    hyperparams: dict[str, Any]
    seed: int
    feature_names: list[str]
    numeric: list[bool]

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

# - - - - - - - - - - - - - - - - - - -

def majority(counts) -> int:
    """
    Majority class of [present, absent] counts, ties to PRESENT.
    """
    return ABSENT if counts[ABSENT] > counts[PRESENT] else PRESENT


def class_counts(y: np.ndarray) -> list[int]:
    return np.bincount(y, minlength=2)[:2].astype(int).tolist()


def validate_hyperparams(schema: type[Hyperparams], hp: dict | Hyperparams | None) -> Hyperparams:
    """
    Validate raw hyperparameters against a learner schema.

    Args:
        schema (type[Hyperparams]): Learner schema.
        hp (dict | Hyperparams | None): Raw values, None for defaults.

    Returns:
        Hyperparams: Validated hyperparameters.
    """
    if isinstance(hp, schema):
        return hp
    if isinstance(hp, Hyperparams):
        hp = hp.model_dump()
    try:
        return schema.model_validate(hp or {})
    except ValidationError as err:
        raise HyperparamError(f"Invalid {schema.__name__}: {err}") from err
