'''
Module for the ingest command.

Created on 19-10-2026
@author: Harry New

'''
import logging
from pathlib import Path

import click

from app.cli.deps import RESAMPLED_DIR, handle_errors, load_config
from app.core.config import RunConfig, settings
from app.ingest import align_channels, load_house, resample, synth_household, write_resampled
from app.models import RawSeries

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

def house_path(config: RunConfig) -> Path:
    """
    House folder; relative paths resolve against the UK-DALE root when it is set.
    """
    house_dir = config.ingest.house_dir
    if not house_dir.is_absolute() and settings.UKDALE_ROOT is not None:
        return settings.UKDALE_ROOT / house_dir
    return house_dir


def raw_channels(config: RunConfig) -> list[RawSeries]:
    if config.ingest.mode == "synth":
        synth = config.ingest.synth
        return synth_household(
            synth.start_date, synth.num_days, config.derive_seed("synth"),
            timezone=config.ingest.timezone, profile=synth,
        )
    return load_house(
        house_path(config), config.ingest.appliances,
        labels_file=config.ingest.labels_file, workers=config.workers,
    )

# - - - - - - - - - - - - - - - - - - -

@click.command("ingest")
@click.pass_context
@handle_errors
def ingest_command(ctx: click.Context) -> None:
    """
    Read or synthesize the appliance channels and write one resampled CSV per appliance.
    """
    config = load_config(ctx)
    channels = [
        resample(series, config.ingest.window_minutes, timezone=config.ingest.timezone)
        for series in raw_channels(config)
    ]
    channels = align_channels(channels)

    out_dir = config.out_dir / RESAMPLED_DIR
    out_dir.mkdir(parents=True, exist_ok=True)
    for channel in channels:
        write_resampled(channel, out_dir / f"{channel.appliance}.csv")
    click.echo(f"Wrote {len(channels)} resampled channels of {len(channels[0])} windows to {out_dir}")
