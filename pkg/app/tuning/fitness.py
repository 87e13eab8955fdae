'''
Module for tuning fitness and the tuning result files.

Created on 19-10-2026
@author: Harry New

'''
import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import yaml

from app.core.errors import ConfigError, DivergenceError, HyperparamError
from app.evaluation.cv import evaluate_fold, fold_assignments, stratified_sample
from app.evaluation.metrics import metrics
from app.learners import hyperparams_from_candidate
from app.models import ABSENT, FeatureSet, LabeledDataset, TuneResult
from app.tuning.qga import Fitness

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

def inner_cv_fitness(
        dataset: LabeledDataset | FeatureSet,
        kind: str,
        *,
        folds: int = 3,
        sample_fraction: float = 0.25,
        seed: int = 0,
        positive_label: int = ABSENT,
        weekday_encoding: str = "ordinal",
    ) -> Fitness:
    """
    Fitness closure: mean F-score of a stratified k-fold CV on a fixed
    stratified sample of the dataset. Candidates that fail validation or
    diverge score NaN, which the tuners log and skip.

    Args:
        dataset (LabeledDataset | FeatureSet): Tuning rows.
        kind (str): Learner kind.
        folds (int, optional): Inner folds. Defaults to 3.
        sample_fraction (float, optional): Share of rows used. Defaults to 0.25.
        seed (int, optional): Seed for the sample, folds and training. Defaults to 0.
        positive_label (int, optional): Positive class. Defaults to ABSENT.
        weekday_encoding (str, optional): Weekday encoding. Defaults to "ordinal".

    Returns:
        Fitness: Candidate to score.
    """
    features = dataset.features(weekday_encoding) if isinstance(dataset, LabeledDataset) else dataset
    rng = np.random.default_rng(seed)
    sample = features.subset(stratified_sample(features.y, sample_fraction, rng))
    assignment = fold_assignments(sample.y, folds, 1, seed)[0]

    def fitness(candidate: dict[str, Any]) -> float:
        try:
            hp = hyperparams_from_candidate(kind, candidate)
            scores = [
                metrics(evaluate_fold(kind, sample, assignment == fold, hp, seed + fold, positive_label)).f1
                for fold in range(folds)
            ]
        except (HyperparamError, DivergenceError) as err:
            logger.warning(f"Candidate {candidate} rejected: {err.detail}")
            return math.nan
        return float(np.mean(scores))

    return fitness

# - - - - - - - - - - - - - - - - - - -
# RESULT FILES

def generation_bests(result: TuneResult) -> list[float]:
    """
    Best fitness so far at the end of each generation.
    """
    bests: dict[int, float] = {}
    running = -math.inf
    for entry in result.log:
        if not entry.skipped:
            running = max(running, entry.fitness)
        bests[entry.generation] = running
    return [bests[g] for g in sorted(bests)]


def write_tune_result(result: TuneResult, kind: str, out_dir: Path) -> list[Path]:
    """
    Write the evaluation log as CSV and the best hyperparameters as YAML.

    Args:
        result (TuneResult): Tuning result.
        kind (str): Learner kind.
        out_dir (Path): Output directory.

    Returns:
        list[Path]: Log file and best-hyperparameters file.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    log_path = out_dir / f"{kind}_{result.method}_log.csv"
    frame = pd.DataFrame(
        [
            {
                "generation": entry.generation,
                "candidate_index": entry.candidate_index,
                "fitness": entry.fitness,
                "skipped": entry.skipped,
                "candidate": json.dumps(entry.candidate, sort_keys=True),
            }
            for entry in result.log
        ],
        columns=["generation", "candidate_index", "fitness", "skipped", "candidate"],
    )
    frame.to_csv(log_path, index=False, lineterminator="\n")

    best_path = out_dir / f"{kind}_best.yaml"
    best = {
        "learner": kind,
        "method": result.method,
        "fitness": float(result.best_fitness),
        "hyperparams": hyperparams_from_candidate(kind, result.best_candidate).model_dump(),
    }
    best_path.write_text(yaml.safe_dump(best, sort_keys=False), encoding="utf-8")
    logger.info(f"Wrote {kind} tuning log to {log_path} and best hyperparameters to {best_path}.")
    return [log_path, best_path]


def read_best_hyperparams(out_dir: Path, kind: str) -> dict[str, Any] | None:
    """
    Best hyperparameters written by a previous tune, or None if there are none.
    """
    path = Path(out_dir) / f"{kind}_best.yaml"
    if not path.exists():
        return None
    try:
        content = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as err:
        raise ConfigError(f"Best hyperparameters file {path} is not valid YAML: {err}") from err
    if content.get("learner") != kind or not isinstance(content.get("hyperparams"), dict):
        raise ConfigError(f"Best hyperparameters file {path} does not describe learner {kind!r}.")
    return content["hyperparams"]
