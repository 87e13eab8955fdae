'''
Module for utils functions for testing.

Created on 19-10-2026
@author: Harry New

'''
from datetime import date

import numpy as np
import pandas as pd

from app.evaluation.cv import summarize_cv
from app.models import APPLIANCES, ConfusionMatrix, CvResult, FeatureSet, ResampledSeries

# - - - - - - - - - - - - - - - - - - -

# Small networks and forests so learner tests stay quick.
FAST_HYPERPARAMS = {
    "random_forest": {"tree_count": 10},
    "mlp": {"layer_sizes": [8], "learning_rate": 0.05, "epochs": 200, "batch_size": 32},
    "deep_nn": {"layer_sizes": [16, 16, 16, 16], "learning_rate": 0.01, "epochs": 200, "batch_size": 32},
}

# - - - - - - - - - - - - - - - - - - -

def make_feature_set(X, y, names: list[str] | None = None, numeric: list[bool] | None = None) -> FeatureSet:
    X = np.asarray(X, dtype=np.int64)
    if X.ndim == 1:
        X = X[:, None]
    names = names or [f"f{i}" for i in range(X.shape[1])]
    numeric = numeric if numeric is not None else [False] * X.shape[1]
    return FeatureSet(X=X, y=np.asarray(y, dtype=np.int64), names=names, numeric=numeric)


def random_feature_set(rng: np.random.Generator, rows: int = 80) -> FeatureSet:
    """
    Rows in the dataset layout with a label loosely tied to the appliances.
    """
    appliances = rng.integers(0, 2, size=(rows, 4))
    calendar = np.column_stack([
        rng.integers(0, 48, rows),
        rng.integers(0, 7, rows),
        rng.integers(1, 29, rows),
        rng.integers(1, 13, rows),
    ])
    y = ((appliances.sum(axis=1) == 0) | (rng.random(rows) < 0.1)).astype(np.int64)
    names = ["tv", "kettle", "oven", "microwave", "time_slot", "weekday", "day", "month"]
    return make_feature_set(np.hstack([appliances, calendar]), y, names, [False] * 4 + [True] * 4)


def channel_text(samples: list[tuple[int, float]]) -> str:
    return "".join(f"{t} {w!r}\n" for t, w in samples)


def local_midnight(day: date, timezone: str = "Europe/London") -> int:
    return int(pd.Timestamp(day).tz_localize(timezone).timestamp())


def make_channels(
        start: date,
        days: int,
        on: dict[str, list[int]] | None = None,
        *,
        window_minutes: int = 30,
        timezone: str = "Europe/London",
    ) -> list[ResampledSeries]:
    """
    Resampled channels on a shared grid, standby everywhere except the given ON windows.

    Args:
        start (date): First local day.
        days (int): Number of days.
        on (dict | None, optional): Window indices per appliance drawing 100 W.
        window_minutes (int, optional): Window length. Defaults to 30.
        timezone (str, optional): Timezone. Defaults to "Europe/London".

    Returns:
        list[ResampledSeries]: tv, kettle, oven and microwave.
    """
    width = window_minutes * 60
    size = days * 1440 // window_minutes
    starts = local_midnight(start, timezone) + width * np.arange(size, dtype=np.int64)
    channels = []
    for name in APPLIANCES:
        means = np.full(size, 1.0)
        for index in (on or {}).get(name, []):
            means[index] = 100.0
        channels.append(ResampledSeries(
            appliance=name, window_minutes=window_minutes, timezone=timezone,
            starts=starts, means=means, counts=np.full(size, width // 6, dtype=np.int64),
        ))
    return channels


def random_cv_result(learner: str, rng: np.random.Generator, runs: int = 2, folds: int = 3) -> CvResult:
    confusions = [
        [
            ConfusionMatrix(
                tp=int(rng.integers(1, 20)), tn=int(rng.integers(1, 20)),
                fp=int(rng.integers(0, 10)), fn=int(rng.integers(0, 10)),
            )
            for _ in range(folds)
        ]
        for _ in range(runs)
    ]
    return summarize_cv(learner, confusions)
