'''
Module for the benchmark command.

Created on 19-10-2026
@author: Harry New

'''
import logging

import click
import numpy as np

from app import crud
from app.cli.deps import TUNING_DIR, get_db, handle_errors, load_config, load_dataset
from app.core.config import RunConfig
from app.evaluation.benchmark import benchmark, render_tables, write_report
from app.evaluation.cv import stratified_sample
from app.tuning.fitness import read_best_hyperparams

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

def resolve_hyperparams(config: RunConfig) -> dict[str, dict]:
    """
    Hyperparameters per learner: tuned values, overridden by the config file.
    """
    resolved = {}
    for kind in config.learners:
        tuned = read_best_hyperparams(config.out_dir / TUNING_DIR, kind) or {}
        resolved[kind] = {**tuned, **config.hyperparams.get(kind, {})}
        if tuned:
            logger.info(f"Using tuned hyperparameters for {kind}.")
    return resolved


@click.command("benchmark")
@click.option("--runs", type=int, default=None, help="Cross-validation repetitions.")
@click.option("--folds", type=int, default=None, help="Folds per repetition.")
@click.option("--subsample", type=float, default=None, help="Stratified share of the dataset to use.")
@click.option("--learners", type=str, default=None, help="Comma-separated learner kinds.")
@click.option("--name", type=str, default=None, help="Name stored in the results database.")
@click.pass_context
@handle_errors
def benchmark_command(ctx: click.Context, runs: int | None, folds: int | None, subsample: float | None, learners: str | None, name: str | None) -> None:
    """
    Cross-validate the learners, compare them against the best one and write the report.
    """
    config = load_config(ctx, **{
        "cv.runs": runs,
        "cv.folds": folds,
        "subsample": subsample,
        "learners": [kind.strip() for kind in learners.split(",") if kind.strip()] if learners else None,
    })
    hyperparams = resolve_hyperparams(config)
    dataset = load_dataset(config)
    if config.subsample < 1:
        rng = np.random.default_rng(config.derive_seed("subsample"))
        dataset = dataset.subset(stratified_sample(dataset.labels, config.subsample, rng))
        logger.info(f"Benchmarking on a {config.subsample:.0%} stratified subsample of {len(dataset)} rows.")

    cv = config.cv
    report = benchmark(
        dataset, config.learners, hyperparams,
        folds=cv.folds, runs=cv.runs, rng_seed=config.derive_seed("cv"),
        stratified=cv.stratified, pooled=cv.pooled, corrected=cv.corrected, alpha=cv.alpha,
        positive_label=cv.positive_label, weekday_encoding=cv.weekday_encoding,
        workers=config.workers,
    )
    write_report(report, config.out_dir)

    run_name = name or f"seed-{config.seed}"
    with get_db(config.out_dir) as session:
        previous = crud.get_benchmark_run_by_name(session=session, name=run_name)
        if previous:
            crud.delete_benchmark_run(session=session, benchmark_run=previous)
        benchmark_run = crud.create_benchmark_run(
            session=session, name=run_name, seed=config.seed, folds=cv.folds, runs=cv.runs,
            positive_label=cv.positive_label, pooled=cv.pooled, corrected=cv.corrected, alpha=cv.alpha,
        )
        crud.store_benchmark_report(session=session, benchmark_run=benchmark_run, report=report)

    click.echo(render_tables(report), nl=False)
