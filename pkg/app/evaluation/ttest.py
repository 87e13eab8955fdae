'''
Module for the corrected resampled paired t-test.

Created on 19-10-2026
@author: Harry New

'''
import logging
import math

import numpy as np
from scipy import stats

from app.core.errors import MetricsError
from app.models import TTestResult

# - - - - - - - - - - - - - - - - - - -

logger = logging.getLogger(__name__)

# - - - - - - - - - - - - - - - - - - -

def paired_ttest(
        scores_a,
        scores_b,
        alpha: float = 0.05,
        test_train_ratio: float = 1 / 9,
        *,
        baseline: str = "a",
        challenger: str = "b",
    ) -> TTestResult:
    """
    Two-sided paired t-test on per-(run, fold) scores. The variance of the
    differences is scaled by (1/n + test_train_ratio); a ratio of 0 gives the
    plain paired t-test.

    Zero variance with a zero mean difference gives t = 0 and no significance.
    Zero variance with a nonzero mean gives an infinite t, p = 0, and is
    flagged degenerate.

    Args:
        scores_a (array-like): Baseline scores.
        scores_b (array-like): Challenger scores on the same folds.
        alpha (float, optional): Significance level. Defaults to 0.05.
        test_train_ratio (float, optional): Test to train size ratio. Defaults to 1/9.
        baseline (str, optional): Baseline name. Defaults to "a".
        challenger (str, optional): Challenger name. Defaults to "b".

    Returns:
        TTestResult: t statistic, p value and significance.
    """
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if a.shape != b.shape:
        raise MetricsError(f"Paired samples differ in length: {len(a)} != {len(b)}.")
    n = len(a)
    if n < 2:
        raise MetricsError(f"Paired t-test needs at least 2 pairs, got {n}.")

    differences = a - b
    mean = float(np.mean(differences))
    variance = float(np.var(differences, ddof=1))

    if variance == 0.0:
        if mean == 0.0:
            return TTestResult(baseline=baseline, challenger=challenger, t=0.0, p=1.0, significant=False)
        logger.warning(f"Zero-variance score differences between {baseline} and {challenger}: treated as significant.")
        return TTestResult(
            baseline=baseline, challenger=challenger,
            t=math.copysign(math.inf, mean), p=0.0,
            significant=alpha > 0, degenerate=True,
        )

    t = mean / math.sqrt(variance * (1 / n + test_train_ratio))
    p = float(2 * stats.t.sf(abs(t), df=n - 1))
    return TTestResult(baseline=baseline, challenger=challenger, t=t, p=p, significant=p < alpha)
