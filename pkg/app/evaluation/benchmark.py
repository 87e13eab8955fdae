'''
Module for benchmarking learners and rendering the report tables.

Created on 19-10-2026
@author: Harry New

'''
import logging
from pathlib import Path
from typing import Any

import pandas as pd

from app.core.errors import ConfigError
from app.evaluation.cv import cross_validate
from app.evaluation.ttest import paired_ttest
from app.models import ABSENT, BenchmarkReport, CvResult, LabeledDataset, TTestResult

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ["accuracy", "precision", "recall", "f1"]

# - - - - - - - - - - - - - - - - - - -

def compare(results: dict[str, CvResult], *, folds: int, corrected: bool = True, alpha: float = 0.05) -> tuple[str | None, list[TTestResult]]:
    """
    Pick the baseline, the learner with the best average F-score (first in
    order on ties), and t-test every other learner against it.

    Args:
        results (dict[str, CvResult]): Results per learner, in benchmark order.
        folds (int): Folds per run, for the variance correction.
        corrected (bool, optional): Apply the resampling correction. Defaults to True.
        alpha (float, optional): Significance level. Defaults to 0.05.

    Returns:
        tuple[str | None, list[TTestResult]]: Baseline and t-tests.
    """
    if not results:
        return None, []
    baseline = None
    for learner, result in results.items():
        if baseline is None or result.average.f1 > results[baseline].average.f1:
            baseline = learner

    ratio = 1 / (folds - 1) if corrected else 0.0
    ttests = [
        paired_ttest(
            results[baseline].f1_scores(), result.f1_scores(), alpha, ratio,
            baseline=baseline, challenger=learner,
        )
        for learner, result in results.items()
        if learner != baseline
    ]
    return baseline, ttests


def benchmark(
        dataset: LabeledDataset,
        learners: list[str],
        hyperparams: dict[str, dict[str, Any]] | None = None,
        *,
        folds: int = 10,
        runs: int = 10,
        rng_seed: int = 0,
        stratified: bool = True,
        pooled: bool = False,
        corrected: bool = True,
        alpha: float = 0.05,
        positive_label: int = ABSENT,
        weekday_encoding: str = "ordinal",
        workers: int = 1,
    ) -> BenchmarkReport:
    """
    Cross-validate every learner on the same folds and compare them.

    Args:
        dataset (LabeledDataset): Labeled rows.
        learners (list[str]): Learner kinds.
        hyperparams (dict | None, optional): Hyperparameters per kind. Defaults to None.
        folds (int, optional): Folds per run. Defaults to 10.
        runs (int, optional): Repetitions. Defaults to 10.
        rng_seed (int, optional): Seed shared by all learners. Defaults to 0.
        stratified (bool, optional): Stratify folds. Defaults to True.
        pooled (bool, optional): Pool confusion counts within a run. Defaults to False.
        corrected (bool, optional): Corrected t-test. Defaults to True.
        alpha (float, optional): Significance level. Defaults to 0.05.
        positive_label (int, optional): Positive class. Defaults to ABSENT.
        weekday_encoding (str, optional): Weekday encoding. Defaults to "ordinal".
        workers (int, optional): Parallel folds. Defaults to 1.

    Returns:
        BenchmarkReport: Results, baseline and t-tests.
    """
    if not learners:
        raise ConfigError("Benchmark needs at least one learner.")
    features = dataset.features(weekday_encoding)
    results = {}
    for kind in learners:
        results[kind] = cross_validate(
            features, kind, (hyperparams or {}).get(kind), folds, runs, rng_seed,
            stratified=stratified, pooled=pooled, positive_label=positive_label, workers=workers,
        )
    baseline, ttests = compare(results, folds=folds, corrected=corrected, alpha=alpha)
    if baseline is not None:
        logger.info(f"Benchmark baseline: {baseline}")
    return BenchmarkReport(results=results, baseline=baseline, ttests=ttests)

# - - - - - - - - - - - - - - - - - - -
# REPORTS

def metrics_frame(report: BenchmarkReport) -> pd.DataFrame:
    """
    One row per learner and statistic ("best", "average").
    """
    rows = []
    for stat in ("best", "average"):
        for learner, result in report.results.items():
            values = result.best if stat == "best" else result.average
            rows.append({"learner": learner, "stat": stat, **{m: getattr(values, m) for m in METRIC_COLUMNS}})
    return pd.DataFrame(rows, columns=["learner", "stat", *METRIC_COLUMNS])


def ttest_frame(report: BenchmarkReport) -> pd.DataFrame:
    return pd.DataFrame(
        [test.model_dump(include={"baseline", "challenger", "t", "p", "significant"}) for test in report.ttests],
        columns=["baseline", "challenger", "t", "p", "significant"],
    )


def render_tables(report: BenchmarkReport) -> str:
    """
    Aligned plain-text tables: best run, average, then the t-tests.
    """
    frame = metrics_frame(report)
    sections = []
    for stat, title in (("best", "Best run"), ("average", "Average")):
        table = frame[frame["stat"] == stat].drop(columns="stat").set_index("learner")
        sections.append(f"{title}\n{table.to_string(float_format=lambda v: f'{v:.4f}')}")
    tests = ttest_frame(report)
    if tests.empty:
        sections.append("Paired t-tests\n(no comparisons)")
    else:
        sections.append(f"Paired t-tests (baseline {report.baseline})\n{tests.to_string(index=False, float_format=lambda v: f'{v:.4f}')}")
    return "\n\n".join(sections) + "\n"


def write_report(report: BenchmarkReport, out_dir: Path) -> list[Path]:
    """
    Write report.txt, metrics.csv and ttests.csv.

    Args:
        report (BenchmarkReport): Benchmark report.
        out_dir (Path): Output directory.

    Returns:
        list[Path]: Written files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text_path = out_dir / "report.txt"
    text_path.write_text(render_tables(report), encoding="utf-8")
    metrics_path = out_dir / "metrics.csv"
    metrics_frame(report).to_csv(metrics_path, index=False, lineterminator="\n")
    ttests_path = out_dir / "ttests.csv"
    ttest_frame(report).to_csv(ttests_path, index=False, lineterminator="\n")
    logger.info(f"Wrote benchmark report to {out_dir}.")
    return [text_path, metrics_path, ttests_path]
