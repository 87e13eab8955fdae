'''
Module for handling CRUD operations on the results database.

Created on 19-10-2026
@author: Harry New

'''
from sqlmodel import Session, select

from app.core.errors import ResultsStoreError
from app.evaluation.benchmark import compare
from app.evaluation.cv import summarize_cv
from app.models import BenchmarkReport, BenchmarkRun, ConfusionMatrix, CvResult, FoldScore

# - - - - - - - - - - - - - - - - - - -
# BENCHMARK RUN OPERATIONS

def create_benchmark_run(
        *,
        session: Session,
        name: str,
        seed: int,
        folds: int,
        runs: int,
        positive_label: int = 1,
        pooled: bool = False,
        corrected: bool = True,
        alpha: float = 0.05,
    ) -> BenchmarkRun:
    """
    Create benchmark run.

    Args:
        session (Session): SQL session.
        name (str): Unique run name.
        seed (int): Master seed.
        folds (int): Folds per CV run.
        runs (int): CV repetitions.
        positive_label (int, optional): Positive class. Defaults to 1.
        pooled (bool, optional): Pooled run metrics. Defaults to False.
        corrected (bool, optional): Corrected t-test. Defaults to True.
        alpha (float, optional): Significance level. Defaults to 0.05.

    Returns:
        BenchmarkRun: BenchmarkRun model.
    """
    if get_benchmark_run_by_name(session=session, name=name):
        raise ResultsStoreError(f"Benchmark run {name!r} already exists.")
    db_obj = BenchmarkRun(
        name=name, seed=seed, folds=folds, runs=runs,
        positive_label=positive_label, pooled=pooled, corrected=corrected, alpha=alpha,
    )
    session.add(db_obj)
    session.commit()
    session.refresh(db_obj)
    return db_obj


def get_benchmark_run_by_name(*, session: Session, name: str) -> BenchmarkRun | None:
    """
    Get benchmark run by name.

    Args:
        session (Session): SQL session.
        name (str): Run name.

    Returns:
        BenchmarkRun | None: BenchmarkRun model or none.
    """
    statement = select(BenchmarkRun).where(BenchmarkRun.name == name)
    return session.exec(statement).first()


def get_latest_benchmark_run(*, session: Session) -> BenchmarkRun | None:
    statement = select(BenchmarkRun).order_by(BenchmarkRun.id.desc())
    return session.exec(statement).first()


def delete_benchmark_run(*, session: Session, benchmark_run: BenchmarkRun) -> None:
    """
    Delete benchmark run and its fold scores.

    Args:
        session (Session): SQL session.
        benchmark_run (BenchmarkRun): BenchmarkRun model.
    """
    for score in get_fold_scores(session=session, benchmark_run=benchmark_run):
        session.delete(score)
    session.delete(benchmark_run)
    session.commit()

# - - - - - - - - - - - - - - - - - - -
# FOLD SCORE OPERATIONS

def add_fold_scores(*, session: Session, benchmark_run: BenchmarkRun, result: CvResult) -> list[FoldScore]:
    """
    Add one score row per (run, fold) of a learner's CV result.

    Args:
        session (Session): SQL session.
        benchmark_run (BenchmarkRun): BenchmarkRun model.
        result (CvResult): Cross-validation result.

    Returns:
        list[FoldScore]: FoldScore models.
    """
    scores = []
    for run, (confusions, reports) in enumerate(zip(result.fold_confusions, result.fold_reports)):
        for fold, (cm, report) in enumerate(zip(confusions, reports)):
            scores.append(FoldScore(
                learner=result.learner, run=run, fold=fold,
                **cm.model_dump(), **report.model_dump(),
                benchmark_id=benchmark_run.id,
            ))
    session.add_all(scores)
    session.commit()
    for score in scores:
        session.refresh(score)
    return scores


def get_fold_scores(*, session: Session, benchmark_run: BenchmarkRun, learner: str | None = None) -> list[FoldScore]:
    """
    Get fold scores of a benchmark run in insertion order.

    Args:
        session (Session): SQL session.
        benchmark_run (BenchmarkRun): BenchmarkRun model.
        learner (str | None, optional): Only this learner. Defaults to None.

    Returns:
        list[FoldScore]: FoldScore models.
    """
    statement = select(FoldScore).where(FoldScore.benchmark_id == benchmark_run.id)
    if learner is not None:
        statement = statement.where(FoldScore.learner == learner)
    return list(session.exec(statement.order_by(FoldScore.id)).all())

# - - - - - - - - - - - - - - - - - - -
# REPORT OPERATIONS

def store_benchmark_report(*, session: Session, benchmark_run: BenchmarkRun, report: BenchmarkReport) -> None:
    for result in report.results.values():
        add_fold_scores(session=session, benchmark_run=benchmark_run, result=result)


def load_benchmark_report(*, session: Session, benchmark_run: BenchmarkRun) -> BenchmarkReport:
    """
    Rebuild a benchmark report from stored fold confusion counts.

    Args:
        session (Session): SQL session.
        benchmark_run (BenchmarkRun): BenchmarkRun model.

    Returns:
        BenchmarkReport: Report with the same tables and t-tests as when stored.
    """
    grouped: dict[str, dict[tuple[int, int], ConfusionMatrix]] = {}
    for score in get_fold_scores(session=session, benchmark_run=benchmark_run):
        grouped.setdefault(score.learner, {})[(score.run, score.fold)] = ConfusionMatrix(
            tp=score.tp, tn=score.tn, fp=score.fp, fn=score.fn,
        )
    if not grouped:
        raise ResultsStoreError(f"Benchmark run {benchmark_run.name!r} has no fold scores.")

    results = {}
    for learner, cells in grouped.items():
        expected = {(r, f) for r in range(benchmark_run.runs) for f in range(benchmark_run.folds)}
        if set(cells) != expected:
            raise ResultsStoreError(f"Benchmark run {benchmark_run.name!r} has incomplete scores for {learner}.")
        confusions = [[cells[(r, f)] for f in range(benchmark_run.folds)] for r in range(benchmark_run.runs)]
        results[learner] = summarize_cv(learner, confusions, pooled=benchmark_run.pooled)

    baseline, ttests = compare(
        results, folds=benchmark_run.folds, corrected=benchmark_run.corrected, alpha=benchmark_run.alpha,
    )
    return BenchmarkReport(results=results, baseline=baseline, ttests=ttests)
