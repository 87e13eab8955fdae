'''
Module for CLI dependencies.

Created on 19-10-2026
@author: Harry New

'''
import functools
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Generator, Optional

import click
from pydantic import BaseModel, Field
from sqlmodel import Session

from app.core.config import RunConfig, load_run_config
from app.core.db import create_db_and_tables, get_engine
from app.core.errors import AbsenceError, ConfigError
from app.dataset_builder import read_dataset
from app.ingest import read_resampled
from app.models import APPLIANCES, LabeledDataset, ResampledSeries

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

RESAMPLED_DIR = "resampled"
TUNING_DIR = "tuning"
DATASET_FILE = "dataset.csv"
MANIFEST_FILE = "manifest.yaml"
HISTOGRAM_FILE = "weekday_histogram.csv"

# - - - - - - - - - - - - - - - - - - -

class GlobalOptions(BaseModel):
    """
    Options given before the command name.
    """
    config_path: Optional[Path] = None
    overrides: dict[str, Any] = Field(default_factory=dict)


def load_config(ctx: click.Context, **overrides: Any) -> RunConfig:
    """
    Load the run config, global flags first, then command flags.

    Args:
        ctx (click.Context): Click context holding GlobalOptions.
        **overrides: Command flag values under dotted keys, None when not given.

    Returns:
        RunConfig: Validated config.
    """
    options: GlobalOptions = ctx.obj or GlobalOptions()
    return load_run_config(options.config_path, {**options.overrides, **overrides})


def handle_errors(func: Callable) -> Callable:
    """
    Report toolkit and I/O errors on stderr and exit with their code:
    2 for configuration errors, 1 otherwise.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except AbsenceError as err:
            logger.debug("Command failed.", exc_info=True)
            click.echo(f"Error: {err.detail}", err=True)
            ctx.exit(err.exit_code)
        except OSError as err:
            logger.debug("Command failed.", exc_info=True)
            click.echo(f"Error: {err}", err=True)
            ctx.exit(1)
    return wrapper

# - - - - - - - - - - - - - - - - - - -
# ARTIFACTS

@contextmanager
def get_db(out_dir: Path) -> Generator[Session, None, None]:
    engine = get_engine(out_dir)
    create_db_and_tables(engine)
    with Session(engine) as session:
        yield session


def read_channels(config: RunConfig) -> list[ResampledSeries]:
    """
    Read the resampled channels written by the ingest command.
    """
    directory = config.out_dir / RESAMPLED_DIR
    if not directory.exists():
        raise ConfigError(f"No resampled channels found, expected them in: {directory} (run ingest first)")
    return [
        read_resampled(
            directory / f"{appliance}.csv",
            window_minutes=config.ingest.window_minutes,
            timezone=config.ingest.timezone,
        )
        for appliance in APPLIANCES
    ]


def load_dataset(config: RunConfig) -> LabeledDataset:
    """
    Read the labeled dataset written by the annotate command.
    """
    path = config.out_dir / DATASET_FILE
    if not path.exists():
        raise ConfigError(f"No dataset found, expected it at: {path} (run annotate first)")
    return read_dataset(path, window_minutes=config.ingest.window_minutes)
