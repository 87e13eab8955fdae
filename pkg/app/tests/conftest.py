'''
Module for creating pytest fixtures.

Created on 19-10-2026
@author: Harry New

'''
import pytest
from typing import Generator
from datetime import date
from pathlib import Path

import numpy as np
from click.testing import CliRunner
from sqlmodel import Session

from app.core.config import AnnotationConfig
from app.core.db import get_engine, create_db_and_tables, clear_db
from app.dataset_builder import annotate, binarize_channels, build_dataset
from app.ingest import align_channels, resample, synth_household
from app.models import LabeledDataset, BenchmarkReport
from app.evaluation.benchmark import compare
from app.tests.utils.utils import make_feature_set, random_cv_result

# - - - - - - - - - - - - - - - - - - -

@pytest.fixture(scope="function")
def db(tmp_path) -> Generator[Session, None, None]:
    engine = get_engine(tmp_path)
    with Session(engine) as session:
        # Clear previous tables.
        clear_db(engine)
        # Create database with new tables.
        create_db_and_tables(engine)
        yield session


@pytest.fixture(scope="function")
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture(scope="session")
def synth_dataset() -> LabeledDataset:
    # Two weeks of synthetic traces from a Monday.
    raw = synth_household(date(2013, 1, 7), 14, 1)
    channels = align_channels([resample(series) for series in raw])
    grid = binarize_channels(channels)
    annotation = annotate(grid, AnnotationConfig(), 7)
    return build_dataset(channels, annotation.intervals, provenance=annotation.provenance)


@pytest.fixture(scope="function")
def noiseless():
    # Label equals the tv state.
    tv = np.array([0, 1] * 30)
    return make_feature_set(tv, tv, ["tv"], [False])


@pytest.fixture
def benchmark_report(request) -> BenchmarkReport:
    # Learner list.
    learners = getattr(request, "param", ["c45", "kde_nb"])
    rng = np.random.default_rng(11)
    results = {learner: random_cv_result(learner, rng) for learner in learners}
    baseline, ttests = compare(results, folds=3)
    return BenchmarkReport(results=results, baseline=baseline, ttests=ttests)


@pytest.fixture(scope="function")
def cli_config(tmp_path) -> Path:
    # One synthetic week from a Monday.
    path = tmp_path / "config.yaml"
    path.write_text(
        "ingest:\n"
        "  synth:\n"
        "    start_date: 2013-01-07\n"
        "    num_days: 7\n"
    )
    return path
