'''
Module for the report command.

Created on 19-10-2026
@author: Harry New

'''
import click

from app import crud
from app.cli.deps import get_db, handle_errors, load_config
from app.core.config import settings
from app.core.errors import ResultsStoreError
from app.evaluation.benchmark import render_tables, write_report

# - - - - - - - - - - - - - - - - - - -

@click.command("report")
@click.option("--name", type=str, default=None, help="Stored benchmark run, defaults to the latest.")
@click.pass_context
@handle_errors
def report_command(ctx: click.Context, name: str | None) -> None:
    """
    Re-render the report tables and t-tests of a stored benchmark run.
    """
    config = load_config(ctx)
    if not (config.out_dir / settings.RESULTS_DB_NAME).exists():
        raise ResultsStoreError(f"No results database found in {config.out_dir} (run benchmark first)")

    with get_db(config.out_dir) as session:
        if name:
            benchmark_run = crud.get_benchmark_run_by_name(session=session, name=name)
        else:
            benchmark_run = crud.get_latest_benchmark_run(session=session)
        if benchmark_run is None:
            wanted = f"named {name!r}" if name else "at all"
            raise ResultsStoreError(f"No benchmark run {wanted} stored in {config.out_dir}")
        report = crud.load_benchmark_report(session=session, benchmark_run=benchmark_run)

    write_report(report, config.out_dir)
    click.echo(render_tables(report), nl=False)
