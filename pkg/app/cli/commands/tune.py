'''
Module for the tune command.

Created on 19-10-2026
@author: Harry New

'''
import click

from app.cli.deps import TUNING_DIR, handle_errors, load_config, load_dataset
from app.models import LEARNER_KINDS
from app.tuning.fitness import generation_bests, inner_cv_fitness, write_tune_result
from app.tuning.qga import qga_tune
from app.tuning.random_search import random_search
from app.tuning.space import space_for

# - - - - - - - - - - - - - - - - - - -

# Learners tuned by random search; the others use the quantum genetic algorithm.
RANDOM_SEARCH_KINDS = ("deep_nn",)

# - - - - - - - - - - - - - - - - - - -

@click.command("tune")
@click.option("--learner", type=click.Choice(LEARNER_KINDS), required=True, help="Learner kind to tune.")
@click.option("--population", type=int, default=None, help="QGA population size.")
@click.option("--generations", type=int, default=None, help="QGA generations.")
@click.option("--iterations", type=int, default=None, help="Random search draws.")
@click.pass_context
@handle_errors
def tune_command(ctx: click.Context, learner: str, population: int | None, generations: int | None, iterations: int | None) -> None:
    """
    Tune one learner's hyperparameters and write the evaluation log and best hyperparameters.
    """
    config = load_config(ctx, **{
        "tuning.population": population,
        "tuning.generations": generations,
        "tuning.random_iterations": iterations,
    })
    tuning = config.tuning
    space = space_for(learner, config.search_spaces)
    space.check()
    dataset = load_dataset(config)

    fitness = inner_cv_fitness(
        dataset, learner,
        folds=tuning.inner_folds,
        sample_fraction=tuning.sample_fraction,
        seed=config.derive_seed(f"tune-fitness:{learner}"),
        positive_label=config.cv.positive_label,
        weekday_encoding=config.cv.weekday_encoding,
    )
    seed = config.derive_seed(f"tune:{learner}")
    if learner in RANDOM_SEARCH_KINDS:
        result = random_search(space, fitness, tuning.random_iterations, seed, workers=config.workers)
    else:
        result = qga_tune(
            space, fitness, tuning.population, tuning.generations, seed,
            rotation_angle=tuning.rotation_angle,
            disaster_enabled=tuning.disaster_enabled,
            disaster_patience=tuning.disaster_patience,
            disaster_fraction=tuning.disaster_fraction,
            workers=config.workers,
        )
        click.echo(f"Best fitness per generation: {', '.join(f'{v:.4f}' for v in generation_bests(result))}")

    log_path, best_path = write_tune_result(result, learner, config.out_dir / TUNING_DIR)
    click.echo(f"{learner}: best fitness {result.best_fitness:.4f} with {result.best_candidate}")
    click.echo(f"Wrote {log_path} and {best_path}")
