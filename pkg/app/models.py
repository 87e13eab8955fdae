'''
Module for defining domain models.

Created on 19-10-2026
@author: Harry New

'''
from typing import Literal, Optional, Iterator, Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sqlmodel import SQLModel, Field as SQLField, Relationship

# - - - - - - - - - - - - - - - - - - -

APPLIANCES = ("tv", "kettle", "oven", "microwave")

LearnerKind = Literal["decision_table", "c45", "random_forest", "kde_nb", "mlp", "deep_nn"]
LEARNER_KINDS: tuple[str, ...] = ("decision_table", "c45", "random_forest", "kde_nb", "mlp", "deep_nn")

OFF, ON = 0, 1
PRESENT, ABSENT = 0, 1

# Ordinal feature layout shared by the dataset CSV and the learners.
FEATURE_COLUMNS = ("tv", "kettle", "oven", "microwave", "time_slot", "weekday", "day", "month")
NUMERIC_FEATURES = ("time_slot", "weekday", "day", "month")

# - - - - - - - - - - - - - - - - - - -
# RAW AND RESAMPLED SERIES

class RawSample(BaseModel):
    timestamp: int = Field(gt=0)
    watts: float = Field(ge=0)


class RawSeries(BaseModel):
    """
    Timestamped wattage samples for one appliance channel, held column-wise.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    appliance: str
    timestamps: np.ndarray
    watts: np.ndarray

    @model_validator(mode="after")
    def strictly_increasing(self) -> "RawSeries":
        if self.timestamps.shape != self.watts.shape:
            raise ValueError("timestamps and watts must have equal length")
        if len(self.timestamps) > 1 and np.any(np.diff(self.timestamps) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def samples(self) -> list[RawSample]:
        return [
            RawSample(timestamp=int(t), watts=float(w))
            for t, w in zip(self.timestamps, self.watts)
        ]


class ResampledSeries(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    appliance: str
    window_minutes: int = Field(gt=0)
    timezone: str = "Europe/London"
    starts: np.ndarray
    means: np.ndarray
    counts: np.ndarray

    def __len__(self) -> int:
        return len(self.starts)

    @property
    def values(self) -> list[tuple[int, float, int]]:
        return [
            (int(s), float(m), int(c))
            for s, m, c in zip(self.starts, self.means, self.counts)
        ]

# - - - - - - - - - - - - - - - - - - -
# ANNOTATION

OutingKind = Literal["christmas", "spring_break", "summer", "autumn_weekend", "workday", "saturday"]
FIXED_TRIP_KINDS = ("christmas", "spring_break", "summer", "autumn_weekend")


class OutingInterval(BaseModel):
    model_config = ConfigDict(frozen=True)

    start: int
    end: int
    kind: OutingKind

    @model_validator(mode="after")
    def ordered(self) -> "OutingInterval":
        if self.start >= self.end:
            raise ValueError("interval start must precede end")
        return self

    def contains(self, timestamp: int) -> bool:
        return self.start <= timestamp < self.end


class FeatureRow(BaseModel):
    tv: int = Field(ge=0, le=1)
    kettle: int = Field(ge=0, le=1)
    oven: int = Field(ge=0, le=1)
    microwave: int = Field(ge=0, le=1)
    time_slot: int = Field(ge=0)
    weekday: int = Field(ge=0, le=6)
    day: int = Field(ge=1, le=31)
    month: int = Field(ge=1, le=12)
    window_minutes: int = Field(default=30, gt=0, exclude=True)

    @model_validator(mode="after")
    def slot_in_day(self) -> "FeatureRow":
        if self.time_slot >= 1440 // self.window_minutes:
            raise ValueError(f"time_slot must be below {1440 // self.window_minutes}")
        return self

    def to_vector(self) -> list[int]:
        return [getattr(self, name) for name in FEATURE_COLUMNS]


class FeatureSet(BaseModel):
    """
    Encoded feature matrix handed to learners.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    X: np.ndarray
    y: np.ndarray
    names: list[str]
    numeric: list[bool]

    def __len__(self) -> int:
        return len(self.y)

    def subset(self, indices: np.ndarray) -> "FeatureSet":
        return FeatureSet(X=self.X[indices], y=self.y[indices], names=self.names, numeric=self.numeric)


class LabeledDataset(BaseModel):
    """
    30-minute rows of encoded features plus the absent/present label.

    The frame holds the CSV columns: timestamp, the four appliances,
    time_slot, weekday, day, month and label.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    frame: pd.DataFrame
    window_minutes: int = 30
    provenance: dict[str, Any] = Field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def labels(self) -> np.ndarray:
        return self.frame["label"].to_numpy(dtype=np.int64)

    def features(self, weekday_encoding: str = "ordinal") -> FeatureSet:
        """
        Encode the frame as a feature matrix.

        Args:
            weekday_encoding (str): "ordinal" keeps weekday as 0-6, "onehot" expands it into seven binary columns.

        Returns:
            FeatureSet: Features and labels.
        """
        columns = list(FEATURE_COLUMNS)
        X = self.frame[columns].to_numpy(dtype=np.int64)
        numeric = [name in NUMERIC_FEATURES for name in columns]
        if weekday_encoding == "onehot":
            position = columns.index("weekday")
            onehot = np.eye(7, dtype=np.int64)[X[:, position]]
            X = np.hstack([np.delete(X, position, axis=1), onehot])
            columns = [c for c in columns if c != "weekday"] + [f"weekday_{d}" for d in range(7)]
            numeric = [name in NUMERIC_FEATURES for name in columns]
        return FeatureSet(X=X, y=self.labels, names=columns, numeric=numeric)

    def rows(self) -> Iterator[tuple[FeatureRow, int, int]]:
        for record in self.frame.itertuples(index=False):
            row = FeatureRow(
                tv=record.tv, kettle=record.kettle, oven=record.oven, microwave=record.microwave,
                time_slot=record.time_slot, weekday=record.weekday, day=record.day, month=record.month,
                window_minutes=self.window_minutes,
            )
            yield row, int(record.label), int(record.timestamp)

    def subset(self, indices: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            frame=self.frame.iloc[indices].reset_index(drop=True),
            window_minutes=self.window_minutes,
            provenance=self.provenance,
        )

# - - - - - - - - - - - - - - - - - - -
# EVALUATION

class ConfusionMatrix(BaseModel):
    tp: int = Field(ge=0)
    tn: int = Field(ge=0)
    fp: int = Field(ge=0)
    fn: int = Field(ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(tp=self.tp + other.tp, tn=self.tn + other.tn, fp=self.fp + other.fp, fn=self.fn + other.fn)


class MetricsReport(BaseModel):
    accuracy: float = Field(ge=0, le=1)
    precision: float = Field(ge=0, le=1)
    recall: float = Field(ge=0, le=1)
    f1: float = Field(ge=0, le=1)
    # Set when the formula divided by zero and 0 was returned instead.
    precision_undefined: bool = False
    recall_undefined: bool = False
    f1_undefined: bool = False


class CvResult(BaseModel):
    learner: str
    runs: int
    folds: int
    fold_confusions: list[list[ConfusionMatrix]]
    fold_reports: list[list[MetricsReport]]
    run_means: list[MetricsReport]
    average: MetricsReport
    best_run: int

    @property
    def best(self) -> MetricsReport:
        return self.run_means[self.best_run]

    def f1_scores(self) -> list[float]:
        """
        Per-(run, fold) F-scores in (run, fold) order.
        """
        return [report.f1 for run in self.fold_reports for report in run]


class TTestResult(BaseModel):
    baseline: str
    challenger: str
    t: float
    p: float
    significant: bool
    degenerate: bool = False


class BenchmarkReport(BaseModel):
    """
    Cross-validation results per learner plus t-tests against the baseline,
    the learner with the best average F-score.
    """
    results: dict[str, CvResult]
    baseline: Optional[str] = None
    ttests: list[TTestResult] = Field(default_factory=list)

# - - - - - - - - - - - - - - - - - - -
# TUNING

class TuneLogEntry(BaseModel):
    generation: int
    candidate_index: int
    candidate: dict[str, Any]
    fitness: float
    skipped: bool = False


class TuneResult(BaseModel):
    method: Literal["qga", "random"]
    best_candidate: dict[str, Any]
    best_fitness: float
    log: list[TuneLogEntry]

# - - - - - - - - - - - - - - - - - - -
# RESULTS STORE TABLES

class BenchmarkRun(SQLModel, table=True):
    id: int | None = SQLField(default=None, primary_key=True)
    name: str = SQLField(unique=True, index=True, max_length=255)
    seed: int
    folds: int
    runs: int
    positive_label: int = 1
    pooled: bool = False
    corrected: bool = True
    alpha: float = 0.05
    scores: list["FoldScore"] = Relationship(back_populates="benchmark")


class FoldScore(SQLModel, table=True):
    id: int | None = SQLField(default=None, primary_key=True)
    learner: str = SQLField(index=True, max_length=64)
    run: int
    fold: int
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    precision_undefined: bool = False
    recall_undefined: bool = False
    f1_undefined: bool = False

    benchmark_id: int = SQLField(index=True, foreign_key="benchmarkrun.id")
    benchmark: Optional[BenchmarkRun] = Relationship(back_populates="scores")
