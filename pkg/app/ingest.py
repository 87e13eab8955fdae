'''
Module for reading appliance channels, resampling and binarizing them.

Created on 19-10-2026
@author: Harry New

'''
import io
import logging
import math
from datetime import date, timedelta
from pathlib import Path
from typing import IO, Callable, Iterable, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from app.core.config import SynthConfig
from app.core.errors import AlignmentError, ChannelParseError, ConfigError, OrderingError, ResampleError
from app.models import APPLIANCES, OFF, ON, RawSeries, ResampledSeries

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

SAMPLE_PERIOD_SECONDS = 6
RESAMPLED_COLUMNS = ["window_start", "appliance", "mean_watts", "sample_count"]

# UK-DALE label spellings mapped onto the names used by the toolkit.
APPLIANCE_ALIASES = {
    "tv": "tv",
    "television": "tv",
    "kettle": "kettle",
    "oven": "oven",
    "electric_oven": "oven",
    "microwave": "microwave",
}

# Synthetic generator: (low, high) active power in watts and event duration in minutes.
SYNTH_POWER = {
    "tv": (80.0, 150.0),
    "kettle": (1800.0, 2900.0),
    "oven": (1000.0, 2500.0),
    "microwave": (600.0, 1200.0),
}
SYNTH_DURATION = {
    "tv": (30.0, 180.0),
    "kettle": (2.0, 4.0),
    "oven": (30.0, 90.0),
    "microwave": (2.0, 8.0),
}
SYNTH_RATE = {"tv": 0.6, "kettle": 1.0, "oven": 0.3, "microwave": 0.5}
STANDBY_BAND = (0.5, 1.5)
ACTIVE_BAND = (30.0, 3000.0)

# - - - - - - - - - - - - - - - - - - -
# PARSING

def _empty_series(appliance: str) -> RawSeries:
    return RawSeries(appliance=appliance, timestamps=np.empty(0, dtype=np.int64), watts=np.empty(0, dtype=np.float64))


def _line_problem(line: str) -> str | None:
    """
    Describe what is wrong with one channel line, None when well-formed.
    """
    fields = line.rstrip("\r\n").split(" ")
    if len(fields) != 2:
        return f"expected '<timestamp> <watts>', found {len(fields)} field(s)"
    try:
        timestamp = int(fields[0])
    except ValueError:
        return f"timestamp {fields[0]!r} is not an integer"
    try:
        watts = float(fields[1])
    except ValueError:
        return f"watts {fields[1]!r} is not a number"
    if timestamp <= 0:
        return f"timestamp {timestamp} must be positive"
    if not math.isfinite(watts) or watts < 0:
        return f"watts {fields[1]!r} must be a finite non-negative number"
    return None


def _locate_malformed(lines: Iterable[str], path: str | None = None) -> ChannelParseError:
    for number, line in enumerate(lines, start=1):
        problem = _line_problem(line)
        if problem:
            return ChannelParseError(number, problem, path=path)
    return ChannelParseError(0, "malformed channel file", path=path)


def _opener(source: str | Path | IO) -> Callable[[], IO]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        return lambda: open(path, encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return lambda: io.StringIO(data)


def parse_channel(source: str | Path | IO, *, appliance: str = "unknown") -> RawSeries:
    """
    Parse a UK-DALE channel file of "<timestamp> <watts>" lines.

    Args:
        source (str | Path | IO): Path or byte/text stream.
        appliance (str, optional): Appliance name. Defaults to "unknown".

    Returns:
        RawSeries: Samples in file order.
    """
    opener = _opener(source)
    path = str(source) if isinstance(source, (str, Path)) else None
    try:
        with opener() as handle:
            frame = pd.read_csv(
                handle, sep=" ", header=None, dtype=str,
                keep_default_na=False, skip_blank_lines=False,
            )
    except pd.errors.EmptyDataError:
        return _empty_series(appliance)
    except pd.errors.ParserError:
        with opener() as handle:
            raise _locate_malformed(handle, path)

    if frame.shape[1] != 2:
        with opener() as handle:
            raise _locate_malformed(handle, path)

    timestamps = pd.to_numeric(frame[0], errors="coerce").to_numpy(dtype=np.float64)
    watts = pd.to_numeric(frame[1], errors="coerce").to_numpy(dtype=np.float64)
    with np.errstate(invalid="ignore"):
        bad = (
            ~np.isfinite(timestamps) | ~np.isfinite(watts)
            | (timestamps <= 0) | (np.mod(timestamps, 1) != 0) | (watts < 0)
        )
    if bad.any():
        line = int(np.argmax(bad))
        with opener() as handle:
            lines = handle.read().splitlines()
        raise ChannelParseError(line + 1, _line_problem(lines[line]) or "malformed line", path=path)

    timestamps = timestamps.astype(np.int64)
    steps = np.diff(timestamps)
    if (steps <= 0).any():
        position = int(np.argmax(steps <= 0))
        raise OrderingError(
            position + 2,
            f"timestamp {timestamps[position + 1]} does not follow {timestamps[position]}",
            path=path,
        )

    logger.debug(f"Parsed {len(timestamps)} samples for {appliance}.")
    return RawSeries(appliance=appliance, timestamps=timestamps, watts=watts)


def serialize_channel(series: RawSeries) -> str:
    """
    Write a series back in channel file layout.
    """
    return "".join(f"{int(t)} {float(w)!r}\n" for t, w in zip(series.timestamps, series.watts))


def read_labels(path: Path) -> dict[int, str]:
    """
    Read a UK-DALE labels file mapping channel numbers to appliance names.

    Args:
        path (Path): labels.dat path.

    Returns:
        dict[int, str]: Channel number to normalized appliance name.
    """
    if not Path(path).exists():
        raise ConfigError(f"Labels file not found, expected it at: {path}")

    labels: dict[int, str] = {}
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        raw = raw.strip()
        if not raw:
            continue
        fields = raw.split()
        if len(fields) != 2 or not fields[0].isdigit():
            raise ChannelParseError(number, "expected '<channel> <name>'", path=str(path))
        name = fields[1].lower()
        labels[int(fields[0])] = APPLIANCE_ALIASES.get(name, name)
    return labels


def load_house(house_dir: Path, appliances: Iterable[str] = APPLIANCES, *, labels_file: str = "labels.dat", workers: int = 1) -> list[RawSeries]:
    """
    Load the channels of the requested appliances from a UK-DALE house folder.

    Args:
        house_dir (Path): House folder holding labels.dat and channel_N.dat.
        appliances (Iterable[str], optional): Appliance names. Defaults to the four used by the toolkit.
        labels_file (str, optional): Labels file name. Defaults to "labels.dat".
        workers (int, optional): Parallel parsers, one channel each. Defaults to 1.

    Returns:
        list[RawSeries]: One series per appliance, in request order.
    """
    house_dir = Path(house_dir)
    labels = read_labels(house_dir / labels_file)
    by_name = {name: channel for channel, name in labels.items()}

    paths = []
    for appliance in appliances:
        if appliance not in by_name:
            raise ConfigError(f"No channel labelled {appliance!r} in {house_dir / labels_file}")
        path = house_dir / f"channel_{by_name[appliance]}.dat"
        if not path.exists():
            raise ConfigError(f"Channel file for {appliance} not found, expected it at: {path}")
        paths.append((appliance, path))

    logger.info(f"Parsing {len(paths)} channel files from {house_dir}.")
    return Parallel(n_jobs=workers, prefer="threads")(
        delayed(parse_channel)(path, appliance=appliance) for appliance, path in paths
    )

# - - - - - - - - - - - - - - - - - - -
# RESAMPLING

def utc_offsets(timestamps: np.ndarray, timezone: str) -> np.ndarray:
    """
    UTC offset in seconds of the timezone at each epoch timestamp.
    """
    utc = pd.to_datetime(np.asarray(timestamps, dtype=np.int64), unit="s", utc=True)
    local = utc.tz_convert(timezone).tz_localize(None)
    return (local - utc.tz_localize(None)).total_seconds().to_numpy().astype(np.int64)


def resample(series: RawSeries, window_minutes: int = 30, *, timezone: str = "Europe/London") -> ResampledSeries:
    """
    Mean-resample a series onto windows aligned to local wall-clock boundaries.

    The grid is anchored at the local boundary preceding the first sample and
    advances in fixed steps. Windows without samples get mean 0 and count 0.
    Fixed steps stay on local boundaries only while every UTC offset change in
    the span is a multiple of the window, so a longer window across such a
    change (120 minutes over a DST switch) is rejected.

    Args:
        series (RawSeries): Raw samples.
        window_minutes (int, optional): Window length, must divide 1440. Defaults to 30.
        timezone (str, optional): Dataset timezone. Defaults to "Europe/London".

    Returns:
        ResampledSeries: Contiguous windows covering the series.
    """
    if len(series) == 0:
        raise ResampleError(f"Nothing to resample, {series.appliance} has no samples.")
    if window_minutes <= 0 or 1440 % window_minutes != 0:
        raise ResampleError(f"window_minutes must divide 1440, got {window_minutes}.")

    width = window_minutes * 60
    first = int(series.timestamps[0])
    anchor = first - (first + int(utc_offsets([first], timezone)[0])) % width

    index = (series.timestamps - anchor) // width
    size = int(index[-1]) + 1
    sums = np.bincount(index, weights=series.watts, minlength=size)
    counts = np.bincount(index, minlength=size).astype(np.int64)
    means = np.divide(sums, counts, out=np.zeros(size, dtype=np.float64), where=counts > 0)
    starts = anchor + width * np.arange(size, dtype=np.int64)
    offsets = utc_offsets(starts, timezone)
    drifted = (offsets - offsets[0]) % width != 0
    if drifted.any():
        moved = int(np.argmax(drifted))
        raise ResampleError(
            f"{window_minutes}-minute windows leave local boundaries after the UTC offset change "
            f"before {starts[moved]}; use a window that divides 60."
        )

    logger.debug(f"Resampled {series.appliance} into {size} windows.")
    return ResampledSeries(
        appliance=series.appliance,
        window_minutes=window_minutes,
        timezone=timezone,
        starts=starts,
        means=means,
        counts=counts,
    )


def binarize(mean_watts: float, threshold_watts: float = 10.0) -> int:
    """
    Appliance state from a mean wattage: OFF below the threshold, ON otherwise.
    """
    return OFF if mean_watts < threshold_watts else ON


def binarize_series(means: np.ndarray, threshold_watts: float = 10.0) -> np.ndarray:
    return (np.asarray(means) >= threshold_watts).astype(np.int64)


def write_resampled(series: ResampledSeries, path: Path) -> None:
    frame = pd.DataFrame({
        "window_start": series.starts,
        "appliance": series.appliance,
        "mean_watts": series.means,
        "sample_count": series.counts,
    }, columns=RESAMPLED_COLUMNS)
    frame.to_csv(path, index=False, lineterminator="\n")


def read_resampled(path: Path, *, window_minutes: int, timezone: str = "Europe/London") -> ResampledSeries:
    """
    Read a resampled CSV written by write_resampled.

    Args:
        path (Path): CSV path.
        window_minutes (int): Window length the file was produced with.
        timezone (str, optional): Dataset timezone. Defaults to "Europe/London".

    Returns:
        ResampledSeries: Series read back.
    """
    if not Path(path).exists():
        raise ConfigError(f"Resampled series not found, expected it at: {path}")
    frame = pd.read_csv(path)
    if list(frame.columns) != RESAMPLED_COLUMNS:
        raise ResampleError(f"{path} does not carry the header {','.join(RESAMPLED_COLUMNS)}")
    appliances = frame["appliance"].unique()
    if len(appliances) != 1:
        raise ResampleError(f"{path} must hold exactly one appliance.")
    starts = frame["window_start"].to_numpy(dtype=np.int64)
    if len(starts) > 1 and np.any(np.diff(starts) != window_minutes * 60):
        raise ResampleError(f"{path} windows are not contiguous {window_minutes}-minute steps.")
    return ResampledSeries(
        appliance=str(appliances[0]),
        window_minutes=window_minutes,
        timezone=timezone,
        starts=starts,
        means=frame["mean_watts"].to_numpy(dtype=np.float64),
        counts=frame["sample_count"].to_numpy(dtype=np.int64),
    )

def align_channels(channels: Sequence[ResampledSeries]) -> list[ResampledSeries]:
    """
    Trim resampled channels to the span all of them cover.

    Args:
        channels (Sequence[ResampledSeries]): Channels on the same window length and phase.

    Returns:
        list[ResampledSeries]: Channels sharing one grid.
    """
    if not channels:
        return []
    width = channels[0].window_minutes * 60
    if any(c.window_minutes != channels[0].window_minutes for c in channels):
        raise AlignmentError("Channels were resampled with different window lengths.")
    if any(len(c) == 0 for c in channels):
        raise AlignmentError("Cannot align channels when one of them is empty.")
    if len({int(c.starts[0]) % width for c in channels}) != 1:
        raise AlignmentError("Channel windows start on different boundaries.")

    first = max(int(c.starts[0]) for c in channels)
    last = min(int(c.starts[-1]) for c in channels)
    if first > last:
        raise AlignmentError("Channels do not overlap in time.")

    aligned = []
    for channel in channels:
        keep = (channel.starts >= first) & (channel.starts <= last)
        aligned.append(channel.model_copy(update={
            "starts": channel.starts[keep],
            "means": channel.means[keep],
            "counts": channel.counts[keep],
        }))
    logger.info(f"Aligned {len(channels)} channels to {len(aligned[0].starts)} shared windows.")
    return aligned

# - - - - - - - - - - - - - - - - - - -
# SYNTHETIC HOUSEHOLD

def _local_midnight(day: date, timezone: str) -> int:
    return int(pd.Timestamp(day).tz_localize(timezone).timestamp())


def synth_household(start_date: date, num_days: int, rng_seed: int, *, timezone: str = "Europe/London", profile: SynthConfig | None = None) -> list[RawSeries]:
    """
    Generate 6-second traces for the four appliances.

    Appliances idle at standby most of the time and burst into use inside
    morning and evening windows on week days and a broad window on weekends.
    Week days are idle between the morning and evening windows unless the day
    is drawn as a home day.

    Args:
        start_date (date): First local day.
        num_days (int): Number of days, at least 1.
        rng_seed (int): Generator seed.
        timezone (str, optional): Local timezone for activity windows. Defaults to "Europe/London".
        profile (SynthConfig | None, optional): Activity profile. Defaults to SynthConfig().

    Returns:
        list[RawSeries]: tv, kettle, oven and microwave traces.
    """
    if num_days <= 0:
        raise ConfigError(f"num_days must be at least 1, got {num_days}.")
    profile = profile or SynthConfig()
    rng = np.random.default_rng(rng_seed)

    origin = _local_midnight(start_date, timezone)
    size = num_days * 86400 // SAMPLE_PERIOD_SECONDS
    timestamps = origin + SAMPLE_PERIOD_SECONDS * np.arange(size, dtype=np.int64)
    watts = {name: rng.uniform(*STANDBY_BAND, size) for name in APPLIANCES}

    for offset in range(num_days):
        day = start_date + timedelta(days=offset)
        midnight = _local_midnight(day, timezone)
        if day.weekday() < 5:
            windows = [profile.morning, profile.evening]
            if rng.random() < profile.home_day_probability:
                windows.append((9.0, 15.5))
        else:
            windows = [profile.weekend]

        for low, high in windows:
            window_end = midnight + int(high * 3600)
            for name in APPLIANCES:
                for _ in range(rng.poisson(profile.events_per_window * SYNTH_RATE[name])):
                    begin = midnight + int(rng.uniform(low, high) * 3600)
                    end = min(begin + int(rng.uniform(*SYNTH_DURATION[name]) * 60), window_end)
                    first = max((begin - origin) // SAMPLE_PERIOD_SECONDS, 0)
                    last = min((end - origin) // SAMPLE_PERIOD_SECONDS, size)
                    if last <= first:
                        continue
                    level = rng.uniform(*SYNTH_POWER[name])
                    noise = rng.normal(1.0, 0.02, last - first)
                    watts[name][first:last] = np.clip(level * noise, *ACTIVE_BAND)

    logger.info(f"Generated {num_days} synthetic day(s), {size} samples per appliance.")
    return [RawSeries(appliance=name, timestamps=timestamps, watts=watts[name]) for name in APPLIANCES]
