'''
Module for defining config.

Created on 19-10-2026
@author: Harry New

'''
import hashlib
from datetime import date
from pathlib import Path
from typing import Literal, Optional, Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.core.errors import ConfigError
from app.models import LearnerKind, LEARNER_KINDS, APPLIANCES
from app.tuning.space import SearchSpace

# - - - - - - - - - - - - - - - - - - -

class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="ABSENCE_",
        env_ignore_empty=True,
        extra="ignore",
    )

    LOG_LEVEL: str = "INFO"
    UKDALE_ROOT: Optional[Path] = None
    RESULTS_DB_NAME: str = "results.db"

# - - - - - - - - - - - - - - - - - - -
# RUN CONFIG SECTIONS

class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SynthConfig(Section):
    start_date: date = date(2013, 1, 1)
    num_days: int = Field(default=14, ge=1)
    # Activity windows in local hours.
    morning: tuple[float, float] = (6.5, 8.5)
    evening: tuple[float, float] = (16.5, 23.0)
    weekend: tuple[float, float] = (8.0, 22.0)
    # Chance that a weekday has someone at home during working hours.
    home_day_probability: float = Field(default=0.1, ge=0, le=1)
    events_per_window: int = Field(default=2, ge=0)


class IngestConfig(Section):
    mode: Literal["synth", "ukdale"] = "synth"
    house_dir: Optional[Path] = None
    labels_file: str = "labels.dat"
    appliances: list[str] = Field(default_factory=lambda: list(APPLIANCES))
    window_minutes: int = Field(default=30, gt=0)
    threshold_watts: float = Field(default=10.0, gt=0)
    timezone: str = "Europe/London"
    synth: SynthConfig = Field(default_factory=SynthConfig)

    @field_validator("window_minutes")
    @classmethod
    def divides_day(cls, value: int) -> int:
        if 1440 % value != 0:
            raise ValueError("window_minutes must divide 1440")
        return value

    @model_validator(mode="after")
    def house_for_ukdale(self) -> "IngestConfig":
        if self.mode == "ukdale" and self.house_dir is None:
            raise ValueError("ingest.house_dir is required in ukdale mode")
        return self


class TripConfig(Section):
    enabled: bool = True
    kinds: list[Literal["christmas", "spring_break", "summer", "autumn_weekend"]] = Field(
        default_factory=lambda: ["christmas", "spring_break", "summer", "autumn_weekend"]
    )
    christmas_extension: bool = True
    # (month, day) pairs.
    spring_first_start: tuple[int, int] = (3, 15)
    spring_last_end: tuple[int, int] = (5, 31)
    spring_days: int = Field(default=4, ge=1)
    summer_month: int = Field(default=8, ge=1, le=12)
    summer_start_days: tuple[int, int] = (1, 7)
    summer_days: int = Field(default=14, ge=1)
    autumn_first: tuple[int, int] = (9, 1)
    autumn_last: tuple[int, int] = (11, 30)


class WorkdayConfig(Section):
    enabled: bool = True
    # Minutes after local midnight.
    start_minute: int = Field(default=8 * 60 + 30, ge=0, lt=1440)
    end_minute: int = Field(default=16 * 60, gt=0, le=1440)

    @model_validator(mode="after")
    def ordered(self) -> "WorkdayConfig":
        if self.start_minute >= self.end_minute:
            raise ValueError("workday start must precede end")
        return self


class SaturdayConfig(Section):
    enabled: bool = True
    p_outing: float = Field(default=0.7, ge=0, le=1)
    duration_hours: tuple[float, float] = (2.0, 6.0)
    start_hours: tuple[float, float] = (9.0, 18.0)

    @model_validator(mode="after")
    def ranges(self) -> "SaturdayConfig":
        for name in ("duration_hours", "start_hours"):
            low, high = getattr(self, name)
            if low < 0 or low > high:
                raise ValueError(f"{name} must be an ordered non-negative range")
        return self


class AnnotationConfig(Section):
    trips: TripConfig = Field(default_factory=TripConfig)
    workday: WorkdayConfig = Field(default_factory=WorkdayConfig)
    saturday: SaturdayConfig = Field(default_factory=SaturdayConfig)


class TuningConfig(Section):
    population: int = Field(default=20, ge=2)
    generations: int = Field(default=30, ge=1)
    # Rotation magnitude as a multiple of pi.
    rotation_angle: float = Field(default=0.05, ge=0)
    disaster_enabled: bool = True
    disaster_patience: int = Field(default=5, ge=1)
    disaster_fraction: float = Field(default=0.5, ge=0, le=1)
    random_iterations: int = Field(default=60, ge=1)
    inner_folds: int = Field(default=3, ge=2)
    sample_fraction: float = Field(default=0.25, gt=0, le=1)


class CvConfig(Section):
    folds: int = Field(default=10, ge=2)
    runs: int = Field(default=10, ge=1)
    stratified: bool = True
    pooled: bool = False
    corrected: bool = True
    alpha: float = Field(default=0.05, ge=0, le=1)
    positive_label: Literal[0, 1] = 1
    weekday_encoding: Literal["ordinal", "onehot"] = "ordinal"

# - - - - - - - - - - - - - - - - - - -

class RunConfig(Section):
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    out_dir: Path = Path("output")
    subsample: float = Field(default=1.0, gt=0, le=1)
    ingest: IngestConfig = Field(default_factory=IngestConfig)
    annotation: AnnotationConfig = Field(default_factory=AnnotationConfig)
    learners: list[LearnerKind] = Field(default_factory=lambda: list(LEARNER_KINDS))
    hyperparams: dict[LearnerKind, dict[str, Any]] = Field(default_factory=dict)
    search_spaces: dict[LearnerKind, SearchSpace] = Field(default_factory=dict)
    tuning: TuningConfig = Field(default_factory=TuningConfig)
    cv: CvConfig = Field(default_factory=CvConfig)

    def derive_seed(self, purpose: str) -> int:
        """
        Derive a sub-seed for one purpose from the master seed.

        Args:
            purpose (str): Purpose label, e.g. "annotate" or "cv:c45".

        Returns:
            int: Sub-seed in [0, 2**63).
        """
        return derive_seed(self.seed, purpose)

# - - - - - - - - - - - - - - - - - - -

def derive_seed(master: int, purpose: str) -> int:
    digest = hashlib.sha256(f"{master}:{purpose}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def load_run_config(path: Path | None = None, overrides: dict | None = None) -> RunConfig:
    """
    Load run config from a YAML file and apply flag overrides.

    Args:
        path (Path | None): Config file, optional.
        overrides (dict | None): Flag values, None entries ignored.

    Returns:
        RunConfig: Validated config.
    """
    raw: dict = {}
    if path is not None:
        if not Path(path).exists():
            raise ConfigError(f"Config file not found: {path}")
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as err:
            raise ConfigError(f"Config file {path} is not valid YAML: {err}") from err
        if not isinstance(raw, dict):
            raise ConfigError(f"Config file {path} must hold a mapping.")

    # Flags win. Dotted keys address nested sections, e.g. "cv.runs".
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        *parents, leaf = key.split(".")
        target = raw
        for parent in parents:
            target = target.setdefault(parent, {})
            if not isinstance(target, dict):
                raise ConfigError(f"Config section {parent} must hold a mapping.")
        target[leaf] = value

    try:
        return RunConfig.model_validate(raw)
    except ValidationError as err:
        raise ConfigError(f"Invalid config: {err}") from err

# - - - - - - - - - - - - - - - - - - -

settings = Settings()
