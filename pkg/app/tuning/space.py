'''
Module for hyperparameter search spaces and their chromosome encoding.

Created on 19-10-2026
@author: Harry New

'''
import math
from typing import Annotated, Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import SearchSpaceError

# - - - - - - - - - - - - - - - - - - -

REAL_BITS = 8

# - - - - - - - - - - - - - - - - - - -

class Domain(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CategoricalDomain(Domain):
    type: Literal["categorical"] = "categorical"
    choices: list[Any]

    @property
    def bits(self) -> int:
        return math.ceil(math.log2(len(self.choices))) if len(self.choices) > 1 else 0

    def check(self, name: str) -> None:
        if not self.choices:
            raise SearchSpaceError(f"Search domain {name!r} has no choices.")

    def decode(self, code: int) -> Any:
        return self.choices[min(code, len(self.choices) - 1)]

    def sample(self, rng: np.random.Generator) -> Any:
        return self.choices[int(rng.integers(len(self.choices)))]


class IntDomain(Domain):
    type: Literal["int"] = "int"
    low: int
    high: int
    scale: Literal["linear", "log"] = "linear"

    @property
    def size(self) -> int:
        return self.high - self.low + 1

    @property
    def bits(self) -> int:
        return math.ceil(math.log2(self.size)) if self.size > 1 else 0

    def check(self, name: str) -> None:
        if self.low > self.high:
            raise SearchSpaceError(f"Search domain {name!r} is empty: low {self.low} > high {self.high}.")
        if self.scale == "log" and self.low <= 0:
            raise SearchSpaceError(f"Search domain {name!r} needs a positive low bound on a log scale.")

    def decode(self, code: int) -> int:
        if self.scale == "linear" or self.bits == 0:
            return self.low + min(code, self.size - 1)
        fraction = code / (2 ** self.bits - 1)
        value = math.exp(math.log(self.low) + fraction * (math.log(self.high) - math.log(self.low)))
        return int(min(max(round(value), self.low), self.high))

    def sample(self, rng: np.random.Generator) -> int:
        if self.scale == "linear":
            return int(rng.integers(self.low, self.high + 1))
        value = math.exp(rng.uniform(math.log(self.low), math.log(self.high + 1)))
        return int(min(math.floor(value), self.high))


class RealDomain(Domain):
    type: Literal["real"] = "real"
    low: float
    high: float
    scale: Literal["linear", "log"] = "linear"

    @property
    def bits(self) -> int:
        return REAL_BITS

    def check(self, name: str) -> None:
        if not self.low < self.high:
            raise SearchSpaceError(f"Search domain {name!r} has zero measure: [{self.low}, {self.high}].")
        if self.scale == "log" and self.low <= 0:
            raise SearchSpaceError(f"Search domain {name!r} needs a positive low bound on a log scale.")

    def decode(self, code: int) -> float:
        fraction = code / (2 ** self.bits - 1)
        if self.scale == "log":
            value = math.exp(math.log(self.low) + fraction * (math.log(self.high) - math.log(self.low)))
        else:
            value = self.low + fraction * (self.high - self.low)
        return self._clip(value)

    def sample(self, rng: np.random.Generator) -> float:
        if self.scale == "log":
            return self._clip(math.exp(rng.uniform(math.log(self.low), math.log(self.high))))
        return self._clip(rng.uniform(self.low, self.high))

    def _clip(self, value: float) -> float:
        # exp(log(x)) can land a rounding error outside the bounds.
        return float(min(max(value, self.low), self.high))


AnyDomain = Annotated[Union[CategoricalDomain, IntDomain, RealDomain], Field(discriminator="type")]

# - - - - - - - - - - - - - - - - - - -

class SearchSpace(BaseModel):
    """
    Named hyperparameter domains. Parameters are encoded in declaration order,
    each with a fixed number of bits.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    params: dict[str, AnyDomain] = Field(default_factory=dict)

    @property
    def bit_lengths(self) -> list[int]:
        return [domain.bits for domain in self.params.values()]

    @property
    def total_bits(self) -> int:
        return sum(self.bit_lengths)

    def check(self) -> None:
        if not self.params:
            raise SearchSpaceError("Search space has zero measure: no parameters declared.")
        for name, domain in self.params.items():
            domain.check(name)

    def decode(self, bits: np.ndarray) -> dict[str, Any]:
        """
        Decode a bitstring, most significant bit first per parameter. Codes past
        the end of a domain clamp to its last value.

        Args:
            bits (np.ndarray): Bitstring of length total_bits.

        Returns:
            dict[str, Any]: Candidate hyperparameters.
        """
        candidate = {}
        position = 0
        for (name, domain), width in zip(self.params.items(), self.bit_lengths):
            code = 0
            for bit in bits[position:position + width]:
                code = (code << 1) | int(bit)
            candidate[name] = domain.decode(code)
            position += width
        return candidate

    def sample(self, rng: np.random.Generator) -> dict[str, Any]:
        return {name: domain.sample(rng) for name, domain in self.params.items()}

# - - - - - - - - - - - - - - - - - - -
# DEFAULT SPACES

DEFAULT_SPACES: dict[str, SearchSpace] = {
    "decision_table": SearchSpace(params={
        "stale_limit": IntDomain(low=1, high=10),
    }),
    "c45": SearchSpace(params={
        "criterion": CategoricalDomain(choices=["gain", "gain_ratio"]),
        "min_leaf": IntDomain(low=1, high=64, scale="log"),
        "pruning_confidence": RealDomain(low=0.01, high=0.5, scale="log"),
        "prune": CategoricalDomain(choices=[True, False]),
    }),
    "random_forest": SearchSpace(params={
        "tree_count": IntDomain(low=10, high=150, scale="log"),
        "feature_subset_size": IntDomain(low=1, high=8),
        "min_leaf": IntDomain(low=1, high=32, scale="log"),
        "bootstrap": CategoricalDomain(choices=[True, False]),
    }),
    "kde_nb": SearchSpace(params={
        "bandwidth_mode": CategoricalDomain(choices=["silverman", "scott"]),
        "bandwidth_scale": RealDomain(low=0.1, high=4.0, scale="log"),
    }),
    "mlp": SearchSpace(params={
        "hidden_layers": IntDomain(low=1, high=3),
        "layer_width": IntDomain(low=4, high=64, scale="log"),
        "learning_rate": RealDomain(low=1e-4, high=1e-1, scale="log"),
        "l2": RealDomain(low=1e-6, high=1e-2, scale="log"),
        "epochs": IntDomain(low=10, high=60),
    }),
    "deep_nn": SearchSpace(params={
        "hidden_layers": IntDomain(low=4, high=12),
        "layer_width": IntDomain(low=16, high=128, scale="log"),
        "learning_rate": RealDomain(low=1e-4, high=1e-2, scale="log"),
        "l2": RealDomain(low=1e-6, high=1e-2, scale="log"),
        "epochs": IntDomain(low=10, high=40),
    }),
}


def space_for(kind: str, overrides: dict[str, SearchSpace] | None = None) -> SearchSpace:
    """
    Search space of a learner kind; a configured space replaces the default.
    """
    if overrides and kind in overrides:
        return overrides[kind]
    if kind not in DEFAULT_SPACES:
        raise SearchSpaceError(f"No search space for learner kind {kind!r}.")
    return DEFAULT_SPACES[kind]
