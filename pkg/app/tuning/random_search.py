'''
Module for randomized parameter optimization.

Created on 19-10-2026
@author: Harry New

'''
import logging

import numpy as np

from app.core.errors import ConfigError, SearchSpaceError
from app.models import TuneResult
from app.tuning.qga import Fitness, evaluate_candidates, record_generation
from app.tuning.space import SearchSpace

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

def random_search(space: SearchSpace, fitness: Fitness, iterations: int, rng_seed: int = 0, *, workers: int = 1) -> TuneResult:
    """
    Draw candidates independently, each parameter uniform on its declared
    scale, and keep the best. Ties keep the earliest draw.

    Args:
        space (SearchSpace): Search space.
        fitness (Fitness): Candidate score, higher is better.
        iterations (int): Number of draws.
        rng_seed (int, optional): Seed. Defaults to 0.
        workers (int, optional): Parallel fitness evaluations. Defaults to 1.

    Returns:
        TuneResult: Best candidate and the evaluation log.
    """
    if iterations < 1:
        raise ConfigError(f"Random search needs at least one iteration, got {iterations}.")
    space.check()

    rng = np.random.default_rng(rng_seed)
    candidates = [space.sample(rng) for _ in range(iterations)]
    log = []
    scores = record_generation(0, candidates, evaluate_candidates(fitness, candidates, workers), log)

    best = int(np.argmax(scores))
    if not np.isfinite(scores[best]):
        raise SearchSpaceError("Every candidate had a non-finite fitness.")
    logger.info(f"Random search over {iterations} candidates: best fitness {scores[best]:.5f}")
    return TuneResult(method="random", best_candidate=candidates[best], best_fitness=float(scores[best]), log=log)
