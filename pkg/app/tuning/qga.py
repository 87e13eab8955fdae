'''
Module for the quantum genetic algorithm with quantum disaster.

Created on 19-10-2026
@author: Harry New

'''
import logging
import math
from typing import Any, Callable

import numpy as np
from joblib import Parallel, delayed

from app.core.errors import ConfigError, SearchSpaceError
from app.models import TuneLogEntry, TuneResult
from app.tuning.space import SearchSpace

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

Fitness = Callable[[dict[str, Any]], float]

NORMALIZATION_TOLERANCE = 1e-9

# - - - - - - - - - - - - - - - - - - -

class QuantumPopulation:
    """
    Population of quantum chromosomes. Each qubit is an amplitude pair
    (alpha, beta) with alpha^2 + beta^2 = 1; observing it yields 1 with
    probability beta^2.
    """

    def __init__(self, size: int, bits: int):
        self.alpha = np.full((size, bits), 1 / math.sqrt(2))
        self.beta = np.full((size, bits), 1 / math.sqrt(2))

    def observe(self, rng: np.random.Generator) -> np.ndarray:
        return (rng.random(self.beta.shape) < self.beta ** 2).astype(np.int64)

    def rotate(self, observed: np.ndarray, fitness: np.ndarray, best_bits: np.ndarray, best_fitness: float, angle: float) -> None:
        """
        Rotate every qubit whose observed bit differs from the best bitstring
        toward that bit, for individuals that scored below the best.

        Args:
            observed (np.ndarray): Observed bitstrings, one row per individual.
            fitness (np.ndarray): Their fitness values.
            best_bits (np.ndarray): Best bitstring so far.
            best_fitness (float): Its fitness.
            angle (float): Rotation magnitude in radians.
        """
        toward = np.where(best_bits[None, :] == 1, 1.0, -1.0)
        product = self.alpha * self.beta
        # Sign that moves probability mass toward the target bit.
        sign = np.where(
            product > 0, toward,
            np.where(
                product < 0, -toward,
                np.where(self.alpha == 0, (toward < 0).astype(float), (toward > 0).astype(float)),
            ),
        )
        active = (observed != best_bits[None, :]) & (fitness < best_fitness)[:, None]
        theta = angle * sign * active

        cos, sin = np.cos(theta), np.sin(theta)
        alpha = cos * self.alpha - sin * self.beta
        beta = sin * self.alpha + cos * self.beta
        norm = np.sqrt(alpha ** 2 + beta ** 2)
        self.alpha, self.beta = alpha / norm, beta / norm

    def reset(self, rows: np.ndarray) -> None:
        self.alpha[rows] = 1 / math.sqrt(2)
        self.beta[rows] = 1 / math.sqrt(2)

    def max_normalization_error(self) -> float:
        if self.alpha.size == 0:
            return 0.0
        return float(np.max(np.abs(self.alpha ** 2 + self.beta ** 2 - 1)))

# - - - - - - - - - - - - - - - - - - -

def evaluate_candidates(fitness: Fitness, candidates: list[dict[str, Any]], workers: int = 1) -> list[float]:
    """
    Evaluate candidates, in parallel when workers > 1. Results keep candidate order.
    """
    if workers > 1 and len(candidates) > 1:
        return Parallel(n_jobs=workers, prefer="threads")(delayed(fitness)(c) for c in candidates)
    return [fitness(candidate) for candidate in candidates]


def record_generation(generation: int, candidates: list[dict[str, Any]], scores: list[float], log: list[TuneLogEntry]) -> np.ndarray:
    """
    Append one generation to the log. Non-finite scores are logged as skipped
    and returned as -inf.
    """
    cleaned = np.empty(len(scores))
    for index, (candidate, score) in enumerate(zip(candidates, scores)):
        score = float(score)
        skipped = not math.isfinite(score)
        if skipped:
            logger.warning(f"Generation {generation} candidate {index} skipped: non-finite fitness {score}.")
        log.append(TuneLogEntry(
            generation=generation, candidate_index=index,
            candidate=candidate, fitness=score, skipped=skipped,
        ))
        cleaned[index] = -np.inf if skipped else score
    return cleaned


def qga_tune(
        space: SearchSpace,
        fitness: Fitness,
        population: int = 20,
        generations: int = 30,
        rng_seed: int = 0,
        *,
        rotation_angle: float = 0.05,
        disaster_enabled: bool = True,
        disaster_patience: int = 5,
        disaster_fraction: float = 0.5,
        workers: int = 1,
    ) -> TuneResult:
    """
    Maximize fitness over a search space with a quantum genetic algorithm.

    Each generation observes every chromosome, decodes and scores the
    bitstrings, then rotates the qubits toward the best bitstring so far. After
    disaster_patience generations without improvement the worst fraction of the
    population, bar the current elite, is reset to uniform superposition.

    Args:
        space (SearchSpace): Search space.
        fitness (Fitness): Candidate score, higher is better.
        population (int, optional): Chromosomes per generation. Defaults to 20.
        generations (int, optional): Generations. Defaults to 30.
        rng_seed (int, optional): Seed. Defaults to 0.
        rotation_angle (float, optional): Rotation magnitude as a multiple of pi. Defaults to 0.05.
        disaster_enabled (bool, optional): Enable quantum disaster. Defaults to True.
        disaster_patience (int, optional): Stagnant generations before a disaster. Defaults to 5.
        disaster_fraction (float, optional): Share of the population reset. Defaults to 0.5.
        workers (int, optional): Parallel fitness evaluations. Defaults to 1.

    Returns:
        TuneResult: Best candidate and the evaluation log.
    """
    if population < 2 or generations < 1:
        raise ConfigError(f"QGA needs population >= 2 and generations >= 1, got {population} and {generations}.")
    space.check()

    rng = np.random.default_rng(rng_seed)
    log: list[TuneLogEntry] = []

    # A single-point space needs one evaluation.
    if space.total_bits == 0:
        candidate = space.decode(np.zeros(0, dtype=np.int64))
        scores = record_generation(0, [candidate], evaluate_candidates(fitness, [candidate]), log)
        if not np.isfinite(scores[0]):
            raise SearchSpaceError("The only candidate in the search space has a non-finite fitness.")
        return TuneResult(method="qga", best_candidate=candidate, best_fitness=float(scores[0]), log=log)

    qubits = QuantumPopulation(population, space.total_bits)
    angle = rotation_angle * math.pi
    best_bits, best_fitness, best_candidate = None, -np.inf, None
    stagnant = 0

    for generation in range(generations):
        observed = qubits.observe(rng)
        candidates = [space.decode(bits) for bits in observed]
        scores = record_generation(generation, candidates, evaluate_candidates(fitness, candidates, workers), log)

        elite = int(np.argmax(scores))
        if scores[elite] > best_fitness:
            best_bits, best_fitness, best_candidate = observed[elite].copy(), float(scores[elite]), candidates[elite]
            stagnant = 0
        else:
            stagnant += 1

        if best_bits is not None:
            qubits.rotate(observed, scores, best_bits, best_fitness, angle)
            error = qubits.max_normalization_error()
            assert error < NORMALIZATION_TOLERANCE, f"qubit normalization drifted by {error}"

        if disaster_enabled and stagnant >= disaster_patience:
            count = int(round(disaster_fraction * population))
            worst = [i for i in np.argsort(scores, kind="stable") if i != elite][:count]
            qubits.reset(np.asarray(worst, dtype=np.int64))
            stagnant = 0
            logger.info(f"Quantum disaster at generation {generation}: reset {len(worst)} chromosomes.")

        logger.info(f"QGA generation {generation + 1}/{generations}: best fitness {best_fitness:.5f}")

    if best_candidate is None:
        raise SearchSpaceError("Every candidate had a non-finite fitness.")
    return TuneResult(method="qga", best_candidate=best_candidate, best_fitness=best_fitness, log=log)
