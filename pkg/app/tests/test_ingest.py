'''
Module for testing channel parsing, resampling and binarization.

Created on 19-10-2026
@author: Harry New

'''
import io
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from app.core.config import settings
from app.core.errors import AlignmentError, ChannelParseError, ConfigError, OrderingError, ResampleError
from app.ingest import (
    align_channels, binarize, binarize_series, load_house, parse_channel, read_resampled,
    resample, serialize_channel, synth_household, write_resampled,
)
from app.models import APPLIANCES, OFF, ON, RawSeries
from app.tests.utils.utils import channel_text, local_midnight

# - - - - - - - - - - - - - - - - - - -

BASE = local_midnight(date(2013, 1, 1))

# - - - - - - - - - - - - - - - - - - -
# PARSING TESTS.

def test_parse_channel():
    """
    Test parsing a well-formed channel file.
    """
    # Parse.
    series = parse_channel(io.StringIO("1303132929 1.0\n1303132935 2.5\n"), appliance="kettle")

    # Check samples.
    assert series.appliance == "kettle"
    assert series.timestamps.tolist() == [1303132929, 1303132935]
    assert series.watts.tolist() == [1.0, 2.5]


def test_parse_channel_bytes():
    """
    Test parsing a byte stream.
    """
    series = parse_channel(io.BytesIO(b"10 0\n16 3.5\n"))
    assert len(series) == 2


def test_parse_channel_file(tmp_path: Path):
    """
    Test parsing from a path.

    Args:
        tmp_path (Path): Temporary directory.
    """
    # Write channel file.
    path = tmp_path / "channel_1.dat"
    path.write_text(channel_text([(100, 1.0), (106, 2.0), (112, 0.0)]))

    # Parse.
    series = parse_channel(path)
    assert series.timestamps.tolist() == [100, 106, 112]


def test_parse_empty_channel():
    """
    Test an empty file gives an empty series.
    """
    series = parse_channel(io.StringIO(""))
    assert len(series) == 0


@pytest.mark.parametrize("text,line", [
    ("1 1\n2 2\n3 abc\n", 3),
    ("1 1\n2 2 2\n", 2),
    ("1 1 1\n2 2\n", 1),
    ("1 1\n2 -5\n", 2),
    ("1 1\n0 5\n", 2),
    ("1.5 1\n", 1),
])
def test_parse_malformed_line(text: str, line: int):
    """
    Test malformed lines are reported with their 1-based line number.

    Args:
        text (str): File content.
        line (int): Expected line.
    """
    with pytest.raises(ChannelParseError) as err:
        parse_channel(io.StringIO(text))
    assert err.value.line == line
    assert err.value.detail.startswith(f"line {line}: ")


@pytest.mark.parametrize("text,line", [
    ("10 1\n20 1\n15 1\n", 3),
    ("10 1\n10 1\n", 2),
])
def test_parse_ordering(text: str, line: int):
    """
    Test non-increasing timestamps raise an ordering error on the offending line.

    Args:
        text (str): File content.
        line (int): Expected line.
    """
    with pytest.raises(OrderingError) as err:
        parse_channel(io.StringIO(text))
    assert err.value.line == line


def test_serialize_channel():
    """
    Test serializing a parsed channel reproduces the file.
    """
    # Channel file.
    text = channel_text([(1303132929, 1.0), (1303132935, 2.25), (1303132941, 3000.0)])

    # Parse and write back.
    assert serialize_channel(parse_channel(io.StringIO(text))) == text

# - - - - - - - - - - - - - - - - - - -
# RESAMPLING TESTS.

def test_resample_mass_and_gaps():
    """
    Test resampling keeps the wattage mass and fills gaps with empty windows.
    """
    # One full window at 2 W, then ten samples at 50 W three windows later.
    timestamps = [BASE + 6 * i for i in range(300)] + [BASE + 3 * 1800 + 6 * i for i in range(10)]
    watts = [2.0] * 300 + [50.0] * 10
    series = RawSeries(appliance="tv", timestamps=np.array(timestamps), watts=np.array(watts))

    # Resample.
    resampled = resample(series, 30)

    # Check windows.
    assert resampled.starts.tolist() == [BASE + 1800 * i for i in range(4)]
    assert resampled.counts.tolist() == [300, 0, 0, 10]
    assert resampled.means.tolist() == [2.0, 0.0, 0.0, 50.0]

    # Check mass.
    assert np.isclose(np.sum(resampled.means * resampled.counts), np.sum(watts))


def test_resample_anchor():
    """
    Test the first window starts at the local boundary preceding the first sample.
    """
    # Sample part way into a window.
    series = RawSeries(appliance="tv", timestamps=np.array([BASE + 100, BASE + 2000]), watts=np.array([1.0, 1.0]))
    resampled = resample(series, 30)
    assert resampled.starts[0] == BASE
    assert len(resampled) == 2


def test_resample_half_hour_offset():
    """
    Test windows align to local boundaries in a timezone with a half-hour offset.
    """
    # UTC midnight is 05:30 in Kolkata.
    series = RawSeries(appliance="tv", timestamps=np.array([BASE + 100]), watts=np.array([1.0]))
    resampled = resample(series, 60, timezone="Asia/Kolkata")

    # Local hour boundary at or before the sample.
    assert resampled.starts[0] <= BASE + 100
    assert (resampled.starts[0] + 19800) % 3600 == 0


@pytest.mark.parametrize("first_day,hours", [(date(2013, 3, 30), 71), (date(2013, 10, 26), 73)])
def test_resample_across_dst(first_day: date, hours: int):
    """
    Test windows dividing an hour stay on local boundaries across a DST switch,
    and longer windows that would drift off them raise.

    Args:
        first_day (date): Day before the switch.
        hours (int): Hours in the three local days.
    """
    # Three local days of 10-minute samples.
    start = local_midnight(first_day)
    end = local_midnight(first_day + timedelta(days=3))
    timestamps = np.arange(start, end, 600)
    series = RawSeries(appliance="tv", timestamps=timestamps, watts=np.ones(len(timestamps)))

    # Hour and half-hour windows.
    for window in (30, 60):
        resampled = resample(series, window)
        local = pd.to_datetime(resampled.starts, unit="s", utc=True).tz_convert("Europe/London")
        assert ((local.hour * 60 + local.minute) % window == 0).all()
        assert len(resampled) == hours * 60 // window
        assert resampled.counts.sum() == len(timestamps)

    # Two-hour windows would shift by an hour after the switch.
    with pytest.raises(ResampleError):
        resample(series, 120)

    # Without DST they line up.
    assert (resample(series, 120, timezone="UTC").starts % 7200 == 0).all()


def test_resample_errors():
    """
    Test resampling an empty series or with a bad window raises.
    """
    # Empty series.
    empty = RawSeries(appliance="tv", timestamps=np.empty(0, dtype=np.int64), watts=np.empty(0))
    with pytest.raises(ResampleError):
        resample(empty)

    # Window not dividing a day.
    series = RawSeries(appliance="tv", timestamps=np.array([BASE]), watts=np.array([1.0]))
    with pytest.raises(ResampleError):
        resample(series, 7)


def test_binarize():
    """
    Test the threshold is inclusive for ON.
    """
    assert binarize(9.99) == OFF
    assert binarize(10.0) == ON
    assert binarize(0.0) == OFF
    assert binarize(5.0, threshold_watts=5.0) == ON
    assert binarize_series(np.array([0.0, 9.99, 10.0, 2500.0])).tolist() == [0, 0, 1, 1]


def test_write_read_resampled(tmp_path: Path):
    """
    Test resampled series survive the CSV file.

    Args:
        tmp_path (Path): Temporary directory.
    """
    # Resample.
    series = RawSeries(appliance="oven", timestamps=np.array([BASE, BASE + 4000]), watts=np.array([3.0, 1200.5]))
    resampled = resample(series, 30)

    # Write and read back.
    path = tmp_path / "oven.csv"
    write_resampled(resampled, path)
    loaded = read_resampled(path, window_minutes=30)
    assert loaded.appliance == "oven"
    assert loaded.values == resampled.values


def test_read_resampled_missing(tmp_path: Path):
    """
    Test reading a missing resampled file raises a config error.

    Args:
        tmp_path (Path): Temporary directory.
    """
    with pytest.raises(ConfigError):
        read_resampled(tmp_path / "tv.csv", window_minutes=30)

# - - - - - - - - - - - - - - - - - - -
# ALIGNMENT TESTS.

def _resampled(first_window: int, windows: int, window_minutes: int = 30):
    width = window_minutes * 60
    timestamps = BASE + width * (first_window + np.arange(windows))
    return resample(RawSeries(appliance="tv", timestamps=timestamps, watts=np.ones(windows)), window_minutes)


def test_align_channels():
    """
    Test channels are trimmed to their common span.
    """
    # Windows 0-9 and 3-14.
    aligned = align_channels([_resampled(0, 10), _resampled(3, 12)])

    # Shared windows 3-9.
    for channel in aligned:
        assert channel.starts.tolist() == [BASE + 1800 * i for i in range(3, 10)]
        assert len(channel.means) == len(channel.counts) == 7


def test_align_channels_errors():
    """
    Test alignment rejects disjoint spans, different windows and shifted grids.
    """
    # Disjoint.
    with pytest.raises(AlignmentError):
        align_channels([_resampled(0, 3), _resampled(5, 3)])

    # Different window length.
    with pytest.raises(AlignmentError):
        align_channels([_resampled(0, 3), _resampled(0, 3, window_minutes=60)])

    # Shifted grid.
    shifted = _resampled(0, 3)
    shifted = shifted.model_copy(update={"starts": shifted.starts + 60})
    with pytest.raises(AlignmentError):
        align_channels([_resampled(0, 3), shifted])

# - - - - - - - - - - - - - - - - - - -
# HOUSE AND SYNTH TESTS.

def test_load_house(tmp_path: Path):
    """
    Test loading appliance channels through the labels file.

    Args:
        tmp_path (Path): Temporary directory.
    """
    # House folder.
    (tmp_path / "labels.dat").write_text("1 aggregate\n2 kettle\n3 television\n4 oven\n5 microwave\n")
    for channel in range(1, 6):
        (tmp_path / f"channel_{channel}.dat").write_text(channel_text([(100, float(channel)), (106, 0.0)]))

    # Load.
    channels = load_house(tmp_path, workers=2)

    # Check order and content.
    assert [c.appliance for c in channels] == list(APPLIANCES)
    assert [float(c.watts[0]) for c in channels] == [3.0, 2.0, 4.0, 5.0]


def test_load_house_missing_appliance(tmp_path: Path):
    """
    Test a house without a requested appliance raises a config error.

    Args:
        tmp_path (Path): Temporary directory.
    """
    (tmp_path / "labels.dat").write_text("1 aggregate\n2 kettle\n")
    (tmp_path / "channel_2.dat").write_text(channel_text([(100, 1.0)]))
    with pytest.raises(ConfigError):
        load_house(tmp_path)


@pytest.mark.parametrize("text,error,line", [
    ("100 1\n106 x\n", ChannelParseError, 2),
    ("100 1\n106 1\n103 1\n", OrderingError, 3),
])
def test_load_house_bad_channel(tmp_path: Path, text: str, error: type, line: int):
    """
    Test a bad channel file is named in the error along with the line.

    Args:
        tmp_path (Path): Temporary directory.
        text (str): Content of the bad channel.
        error (type): Expected error.
        line (int): Expected line.
    """
    # House folder with channel 3 broken.
    (tmp_path / "labels.dat").write_text("1 aggregate\n2 kettle\n3 television\n4 oven\n5 microwave\n")
    for channel in range(1, 6):
        (tmp_path / f"channel_{channel}.dat").write_text(channel_text([(100, 1.0), (106, 0.0)]))
    (tmp_path / "channel_3.dat").write_text(text)

    # Load in parallel.
    with pytest.raises(error) as err:
        load_house(tmp_path, workers=4)
    assert err.value.line == line
    assert err.value.detail.startswith(f"{tmp_path / 'channel_3.dat'}: line {line}: ")


def test_labels_error_names_file(tmp_path: Path):
    """
    Test a malformed labels file is named in the error.

    Args:
        tmp_path (Path): Temporary directory.
    """
    (tmp_path / "labels.dat").write_text("1 aggregate\ntwo kettle\n")
    with pytest.raises(ChannelParseError) as err:
        load_house(tmp_path)
    assert err.value.line == 2
    assert "labels.dat: line 2" in err.value.detail


def test_synth_household():
    """
    Test synthetic traces are deterministic and cover the requested days.
    """
    # Generate twice.
    first = synth_household(date(2013, 1, 7), 2, 5)
    second = synth_household(date(2013, 1, 7), 2, 5)

    # Check traces.
    assert [s.appliance for s in first] == list(APPLIANCES)
    for a, b in zip(first, second):
        assert len(a) == 2 * 14400
        assert np.array_equal(a.timestamps, b.timestamps)
        assert np.array_equal(a.watts, b.watts)
        assert a.watts.min() >= 0
        assert a.watts.max() <= 3000

    # A different seed gives different traces.
    other = synth_household(date(2013, 1, 7), 2, 6)
    assert not all(np.array_equal(a.watts, b.watts) for a, b in zip(first, other))


def test_synth_household_days():
    """
    Test synthesizing zero days raises a config error.
    """
    with pytest.raises(ConfigError):
        synth_household(date(2013, 1, 7), 0, 1)


@pytest.mark.skipif(settings.UKDALE_ROOT is None, reason="ABSENCE_UKDALE_ROOT not set")
def test_ukdale_house():
    """
    Test loading and resampling a real UK-DALE house.
    """
    # Load house 1.
    channels = load_house(settings.UKDALE_ROOT / "house_1", workers=4)

    # Resample and align.
    aligned = align_channels([resample(series) for series in channels])
    assert len({len(channel) for channel in aligned}) == 1
    assert len(aligned[0]) > 0
