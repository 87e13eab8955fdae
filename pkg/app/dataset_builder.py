'''
Module for annotating outing events and building the labeled dataset.

Created on 19-10-2026
@author: Harry New

'''
import logging
import math
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd
import yaml
from pydantic import BaseModel, ConfigDict, Field

from app.core.config import AnnotationConfig, TripConfig, WorkdayConfig
from app.core.errors import AlignmentError, ConfigError
from app.ingest import binarize_series
from app.models import (
    ABSENT, APPLIANCES, FIXED_TRIP_KINDS, LabeledDataset, OutingInterval, PRESENT, ResampledSeries,
)

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

DATASET_COLUMNS = ["timestamp", *APPLIANCES, "time_slot", "weekday", "day", "month", "label"]
WEEKDAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")

# - - - - - - - - - - - - - - - - - - -

class ActivityGrid(BaseModel):
    """
    Binarized appliance states on a shared window grid, with calendar fields
    decoded in the dataset timezone.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    appliances: list[str]
    window_minutes: int
    timezone: str
    starts: np.ndarray
    states: np.ndarray
    calendar: pd.DataFrame

    def __len__(self) -> int:
        return len(self.starts)

    @property
    def all_off(self) -> np.ndarray:
        return self.states.sum(axis=1) == 0

    @property
    def years(self) -> list[int]:
        return sorted(int(y) for y in self.calendar["year"].unique())


class Annotation(BaseModel):
    planned_trips: list[OutingInterval]
    intervals: list[OutingInterval]
    provenance: dict[str, Any] = Field(default_factory=dict)

# - - - - - - - - - - - - - - - - - - -
# CALENDAR HELPERS

def _local_epoch(day: date, minute: int, timezone: str) -> int:
    """
    Epoch seconds of a local wall-clock minute; minute 1440 is the next midnight.
    """
    moment = pd.Timestamp(datetime.combine(day, datetime.min.time())) + pd.Timedelta(minutes=minute)
    localized = moment.tz_localize(timezone, ambiguous=False, nonexistent="shift_forward")
    return int(localized.timestamp())


def decode_calendar(starts: np.ndarray, window_minutes: int, timezone: str) -> pd.DataFrame:
    """
    Decode window starts into local calendar fields.

    Args:
        starts (np.ndarray): UTC epoch seconds.
        window_minutes (int): Window length.
        timezone (str): Dataset timezone.

    Returns:
        pd.DataFrame: date, year, month, day, weekday (Monday = 0) and time_slot columns.
    """
    local = pd.to_datetime(starts, unit="s", utc=True).tz_convert(timezone)
    return pd.DataFrame({
        "date": local.date,
        "year": local.year.to_numpy(dtype=np.int64),
        "month": local.month.to_numpy(dtype=np.int64),
        "day": local.day.to_numpy(dtype=np.int64),
        "weekday": local.dayofweek.to_numpy(dtype=np.int64),
        "time_slot": ((local.hour * 60 + local.minute) // window_minutes).to_numpy(dtype=np.int64),
    })


def binarize_channels(channels: Sequence[ResampledSeries], threshold_watts: float = 10.0) -> ActivityGrid:
    """
    Binarize resampled channels that share one window grid.

    Args:
        channels (Sequence[ResampledSeries]): tv, kettle, oven and microwave series.
        threshold_watts (float, optional): ON threshold. Defaults to 10.0.

    Returns:
        ActivityGrid: States in toolkit appliance order.
    """
    by_name = {channel.appliance: channel for channel in channels}
    if sorted(by_name) != sorted(APPLIANCES) or len(channels) != len(APPLIANCES):
        raise AlignmentError(f"Expected one channel each for {', '.join(APPLIANCES)}, got {', '.join(c.appliance for c in channels)}.")

    reference = by_name[APPLIANCES[0]]
    for channel in channels:
        if channel.window_minutes != reference.window_minutes or channel.timezone != reference.timezone:
            raise AlignmentError(f"{channel.appliance} uses a different window or timezone than {reference.appliance}.")
        if not np.array_equal(channel.starts, reference.starts):
            raise AlignmentError(f"{channel.appliance} window grid does not match {reference.appliance}.")

    states = np.column_stack([binarize_series(by_name[name].means, threshold_watts) for name in APPLIANCES])
    return ActivityGrid(
        appliances=list(APPLIANCES),
        window_minutes=reference.window_minutes,
        timezone=reference.timezone,
        starts=reference.starts,
        states=states,
        calendar=decode_calendar(reference.starts, reference.window_minutes, reference.timezone),
    )


def _overlaps(start: int, end: int, intervals: Iterable[OutingInterval]) -> bool:
    return any(interval.start < end and start < interval.end for interval in intervals)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """
    Half-open index ranges of consecutive True values.
    """
    padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(a), int(b)) for a, b in zip(edges[::2], edges[1::2])]

# - - - - - - - - - - - - - - - - - - -
# FIXED TRIPS

def plan_fixed_trips(year: int, rng: np.random.Generator, *, rules: TripConfig | None = None, timezone: str = "Europe/London") -> list[OutingInterval]:
    """
    Plan the Christmas, spring break, summer and autumn weekend trips of one year.

    The three random draws always happen, in that order, so disabling a
    kind never shifts the others.

    Args:
        year (int): Calendar year.
        rng (np.random.Generator): Annotation random stream.
        rules (TripConfig | None, optional): Trip rules. Defaults to TripConfig().
        timezone (str, optional): Dataset timezone. Defaults to "Europe/London".

    Returns:
        list[OutingInterval]: Planned trips in calendar order.
    """
    rules = rules or TripConfig()

    def span(first: date, days: int, kind: str) -> OutingInterval:
        return OutingInterval(
            start=_local_epoch(first, 0, timezone),
            end=_local_epoch(first + timedelta(days=days), 0, timezone),
            kind=kind,
        )

    # Spring break.
    spring_first = date(year, *rules.spring_first_start)
    spring_last = date(year, *rules.spring_last_end) - timedelta(days=rules.spring_days - 1)
    if spring_last < spring_first:
        raise ConfigError("Spring break does not fit between its first start and last end.")
    spring_start = spring_first + timedelta(days=int(rng.integers(0, (spring_last - spring_first).days + 1)))

    # Summer.
    low, high = rules.summer_start_days
    summer_start = date(year, rules.summer_month, int(rng.integers(low, high + 1)))

    # Autumn weekend, Saturday and Sunday both inside the season.
    autumn_first = date(year, *rules.autumn_first)
    autumn_last = date(year, *rules.autumn_last)
    saturdays = [
        autumn_first + timedelta(days=offset)
        for offset in range((autumn_last - autumn_first).days)
        if (autumn_first + timedelta(days=offset)).weekday() == 5
    ]
    if not saturdays:
        raise ConfigError("Autumn window holds no full weekend.")
    autumn_start = saturdays[int(rng.integers(0, len(saturdays)))]

    # Christmas, extended when Boxing Day falls on a weekend.
    christmas_days = 3
    if rules.christmas_extension and date(year, 12, 26).weekday() >= 5:
        christmas_days = 5

    planned = {
        "spring_break": span(spring_start, rules.spring_days, "spring_break"),
        "summer": span(summer_start, rules.summer_days, "summer"),
        "autumn_weekend": span(autumn_start, 2, "autumn_weekend"),
        "christmas": span(date(year, 12, 24), christmas_days, "christmas"),
    }
    if not rules.enabled:
        return []
    return [planned[kind] for kind in ("spring_break", "summer", "autumn_weekend", "christmas") if kind in rules.kinds]


def split_on_activity(interval: OutingInterval, grid: ActivityGrid) -> list[OutingInterval]:
    """
    Keep only the all-OFF windows of an interval, splitting it where an appliance is ON.

    Args:
        interval (OutingInterval): Interval to split.
        grid (ActivityGrid): Binarized states.

    Returns:
        list[OutingInterval]: Sub-intervals of the same kind, inside the grid span.
    """
    width = grid.window_minutes * 60
    lo = int(np.searchsorted(grid.starts, interval.start, side="left"))
    hi = int(np.searchsorted(grid.starts, interval.end, side="left"))
    pieces = []
    for a, b in _runs(grid.all_off[lo:hi]):
        start = int(grid.starts[lo + a])
        end = min(int(grid.starts[lo + b - 1]) + width, interval.end)
        pieces.append(OutingInterval(start=start, end=end, kind=interval.kind))
    return pieces

# - - - - - - - - - - - - - - - - - - -
# EVERYDAY OUTINGS

def annotate_workdays(grid: ActivityGrid, *, fixed_trips: Sequence[OutingInterval] = (), rules: WorkdayConfig | None = None) -> list[OutingInterval]:
    """
    Add a work outing on each week day with no appliance use during working hours.

    Args:
        grid (ActivityGrid): Binarized states.
        fixed_trips (Sequence[OutingInterval], optional): Planned trips; days they overlap are skipped.
        rules (WorkdayConfig | None, optional): Working hours. Defaults to 08:30-16:00.

    Returns:
        list[OutingInterval]: One workday interval per qualifying day.
    """
    rules = rules or WorkdayConfig()
    width = grid.window_minutes
    first_slot = rules.start_minute // width
    last_slot = math.ceil(rules.end_minute / width)
    needed = last_slot - first_slot

    frame = grid.calendar.assign(all_off=grid.all_off)
    working = frame[(frame["weekday"] < 5) & (frame["time_slot"] >= first_slot) & (frame["time_slot"] < last_slot)]

    intervals = []
    for day, rows in working.groupby("date", sort=True):
        start = _local_epoch(day, rules.start_minute, grid.timezone)
        end = _local_epoch(day, rules.end_minute, grid.timezone)
        if len(rows) != needed or not rows["all_off"].all():
            continue
        if _overlaps(start, end, fixed_trips):
            continue
        intervals.append(OutingInterval(start=start, end=end, kind="workday"))

    logger.info(f"Annotated {len(intervals)} workday outing(s).")
    return intervals


def annotate_saturdays(
        grid: ActivityGrid,
        rng: np.random.Generator,
        p_outing: float = 0.7,
        duration_range: tuple[float, float] = (2.0, 6.0),
        start_range: tuple[float, float] = (9.0, 18.0),
        *,
        fixed_trips: Sequence[OutingInterval] = (),
    ) -> list[OutingInterval]:
    """
    Add random outings on Saturdays.

    Every Saturday consumes three draws (outing?, start hour, duration hours)
    whether or not it is eligible. The drawn span is clipped to the day, snapped
    to whole windows and reduced to its longest all-OFF run.

    Args:
        grid (ActivityGrid): Binarized states.
        rng (np.random.Generator): Annotation random stream.
        p_outing (float, optional): Outing probability. Defaults to 0.7.
        duration_range (tuple[float, float], optional): Duration bounds in hours. Defaults to (2.0, 6.0).
        start_range (tuple[float, float], optional): Start hour bounds. Defaults to (9.0, 18.0).
        fixed_trips (Sequence[OutingInterval], optional): Planned trips; Saturdays they overlap are skipped.

    Returns:
        list[OutingInterval]: At most one interval per Saturday.
    """
    if not 0 <= p_outing <= 1:
        raise ConfigError(f"p_outing must lie in [0, 1], got {p_outing}.")
    width = grid.window_minutes * 60
    frame = grid.calendar.assign(all_off=grid.all_off, start=grid.starts)
    saturdays = frame[frame["weekday"] == 5]

    intervals = []
    for day, rows in saturdays.groupby("date", sort=True):
        draw = rng.random()
        start_hour = rng.uniform(*start_range)
        duration = rng.uniform(*duration_range)

        midnight = _local_epoch(day, 0, grid.timezone)
        next_midnight = _local_epoch(day, 1440, grid.timezone)
        if draw >= p_outing or _overlaps(midnight, next_midnight, fixed_trips):
            continue

        begin = midnight + start_hour * 3600
        end = min(begin + duration * 3600, next_midnight)
        inside = rows[(rows["start"] >= begin) & (rows["start"] + width <= end)]
        runs = _runs(inside["all_off"].to_numpy())
        if not runs:
            continue
        # Longest run, earliest on ties.
        a, b = max(runs, key=lambda run: (run[1] - run[0], -run[0]))
        starts = inside["start"].to_numpy()
        intervals.append(OutingInterval(start=int(starts[a]), end=int(starts[b - 1]) + width, kind="saturday"))

    logger.info(f"Annotated {len(intervals)} Saturday outing(s).")
    return intervals


def annotate(grid: ActivityGrid, config: AnnotationConfig, seed: int) -> Annotation:
    """
    Run every annotation rule over a grid with one random stream.

    Args:
        grid (ActivityGrid): Binarized states.
        config (AnnotationConfig): Rule parameters.
        seed (int): Annotation seed.

    Returns:
        Annotation: Planned trips, effective intervals and provenance.
    """
    rng = np.random.default_rng(seed)

    planned: list[OutingInterval] = []
    for year in grid.years:
        planned.extend(plan_fixed_trips(year, rng, rules=config.trips, timezone=grid.timezone))
    intervals = [piece for trip in planned for piece in split_on_activity(trip, grid)]

    if config.workday.enabled:
        intervals.extend(annotate_workdays(grid, fixed_trips=planned, rules=config.workday))
    if config.saturday.enabled:
        intervals.extend(annotate_saturdays(
            grid, rng,
            config.saturday.p_outing, config.saturday.duration_hours, config.saturday.start_hours,
            fixed_trips=planned,
        ))

    intervals.sort(key=lambda interval: (interval.start, interval.end, interval.kind))
    return Annotation(
        planned_trips=planned,
        intervals=intervals,
        provenance={
            "seed": seed,
            "window_minutes": grid.window_minutes,
            "timezone": grid.timezone,
            "rules": config.model_dump(mode="json"),
        },
    )

# - - - - - - - - - - - - - - - - - - -
# DATASET

def label_windows(starts: np.ndarray, intervals: Iterable[OutingInterval]) -> np.ndarray:
    """
    ABSENT where the window start lies inside any interval, PRESENT elsewhere.
    """
    labels = np.full(len(starts), PRESENT, dtype=np.int64)
    for interval in intervals:
        lo = np.searchsorted(starts, interval.start, side="left")
        hi = np.searchsorted(starts, interval.end, side="left")
        labels[lo:hi] = ABSENT
    return labels


def build_dataset(channels: Sequence[ResampledSeries], intervals: Iterable[OutingInterval], *, threshold_watts: float = 10.0, provenance: dict | None = None) -> LabeledDataset:
    """
    Assemble one encoded, labeled row per window.

    Args:
        channels (Sequence[ResampledSeries]): Resampled tv, kettle, oven and microwave series.
        intervals (Iterable[OutingInterval]): Outing intervals.
        threshold_watts (float, optional): ON threshold. Defaults to 10.0.
        provenance (dict | None, optional): Annotation provenance to carry along.

    Returns:
        LabeledDataset: Dataset rows.
    """
    grid = binarize_channels(channels, threshold_watts)
    labels = label_windows(grid.starts, intervals)

    frame = pd.DataFrame({"timestamp": grid.starts})
    for position, name in enumerate(grid.appliances):
        frame[name] = grid.states[:, position]
    for column in ("time_slot", "weekday", "day", "month"):
        frame[column] = grid.calendar[column].to_numpy()
    frame["label"] = labels
    frame = frame[DATASET_COLUMNS]

    dataset = LabeledDataset(frame=frame, window_minutes=grid.window_minutes, provenance=provenance or {})
    histogram = label_histogram(dataset)
    logger.info(f"Built dataset with {len(dataset)} rows: {histogram['absent']} absent, {histogram['present']} present.")
    return dataset


def label_histogram(dataset: LabeledDataset) -> dict[str, int]:
    labels = dataset.labels
    absent = int((labels == ABSENT).sum())
    return {"absent": absent, "present": len(labels) - absent}


def weekday_histogram(dataset: LabeledDataset) -> pd.DataFrame:
    """
    Per-weekday absent and present window counts, Monday first.
    """
    frame = dataset.frame
    rows = []
    for weekday, name in enumerate(WEEKDAY_NAMES):
        day = frame[frame["weekday"] == weekday]
        absent = int((day["label"] == ABSENT).sum())
        rows.append({"weekday": weekday, "name": name, "absent": absent, "present": len(day) - absent})
    return pd.DataFrame(rows, columns=["weekday", "name", "absent", "present"])

# - - - - - - - - - - - - - - - - - - -
# FILES

def write_dataset(dataset: LabeledDataset, path: Path) -> None:
    dataset.frame.to_csv(path, index=False, lineterminator="\n")


def read_dataset(path: Path, *, window_minutes: int = 30) -> LabeledDataset:
    """
    Read a dataset CSV written by write_dataset.

    Args:
        path (Path): CSV path.
        window_minutes (int, optional): Window length. Defaults to 30.

    Returns:
        LabeledDataset: Dataset.
    """
    if not Path(path).exists():
        raise ConfigError(f"Dataset not found, expected it at: {path}")
    frame = pd.read_csv(path, dtype=np.int64)
    if list(frame.columns) != DATASET_COLUMNS:
        raise AlignmentError(f"{path} does not carry the header {','.join(DATASET_COLUMNS)}")
    return LabeledDataset(frame=frame, window_minutes=window_minutes)


def _interval_record(interval: OutingInterval, timezone: str) -> dict:
    local = lambda ts: pd.Timestamp(ts, unit="s", tz="UTC").tz_convert(timezone).isoformat()
    return {
        "kind": interval.kind,
        "start": interval.start,
        "end": interval.end,
        "start_local": local(interval.start),
        "end_local": local(interval.end),
    }


def write_manifest(annotation: Annotation, path: Path) -> None:
    """
    Write the annotation manifest: seed, rule parameters and every interval.
    """
    timezone = annotation.provenance.get("timezone", "UTC")
    document = {
        **annotation.provenance,
        "planned_trips": [_interval_record(i, timezone) for i in annotation.planned_trips],
        "intervals": [_interval_record(i, timezone) for i in annotation.intervals],
    }
    Path(path).write_text(yaml.safe_dump(document, sort_keys=False), encoding="utf-8")
