'''
Module for the command line entry point.

Created on 19-10-2026
@author: Harry New

'''
import logging
from pathlib import Path

import click

from app.cli.deps import GlobalOptions
from app.cli.main import commands
from app.core.config import settings

# - - - - - - - - - - - - - - - - - - -

@click.group()
@click.option("--config", "config_path", type=click.Path(path_type=Path, dir_okay=False), default=None, help="Run config YAML file.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--workers", type=int, default=None, help="Parallel workers.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path, file_okay=False), default=None, help="Output directory.")
@click.pass_context
def cli(ctx: click.Context, config_path: Path | None, seed: int | None, workers: int | None, out_dir: Path | None) -> None:
    """
    Home absence detection from appliance consumption.
    """
    logging.basicConfig(level=settings.LOG_LEVEL.upper(), format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = GlobalOptions(
        config_path=config_path,
        overrides={"seed": seed, "workers": workers, "out_dir": out_dir},
    )


for command in commands:
    cli.add_command(command)

# - - - - - - - - - - - - - - - - - - -

if __name__ == "__main__":
    cli()
