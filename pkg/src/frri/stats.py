"""Nonparametric tests for comparing classifiers over several datasets.

Friedman omnibus test, Conover's post-hoc pairwise comparison on Friedman
ranks, and the Wilcoxon signed-rank test with an exact null distribution
for small samples.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

ALPHA = 0.05
WEAK_ALPHA = 0.10
EXACT_MAX_N = 25


@dataclass
class TestResult:
    statistic: float
    p_value: float
    method: str
    alternative: str = "two-sided"
    pairwise: np.ndarray | None = None  # symmetric matrix of p-values
    pairwise_statistic: np.ndarray | None = None
    mean_ranks: np.ndarray | None = None
    n: int = 0

    @property
    def verdict(self) -> str:
        return significance(self.p_value)


def significance(p: float) -> str:
    if p <= ALPHA:
        return "significant"
    if p <= WEAK_ALPHA:
        return "weakly significant"
    return "not significant"


def _score_matrix(scores) -> np.ndarray:
    m = np.asarray(scores, dtype=float)
    if m.ndim != 2 or m.shape[0] < 2 or m.shape[1] < 2:
        raise ValueError(f"need at least 2 datasets x 2 variants, got shape {m.shape}")
    return m


def friedman_test(scores) -> TestResult:
    """Friedman chi-square with tie correction; rows are datasets, columns variants."""
    m = _score_matrix(scores)
    n, k = m.shape
    ranks = stats.rankdata(m, axis=1)
    rank_sums = ranks.sum(axis=0)
    ties = 0.0
    for row in ranks:
        _, counts = np.unique(row, return_counts=True)
        ties += float((counts ** 3 - counts).sum())
    correction = 1.0 - ties / (n * (k ** 3 - k))
    if correction <= 1e-12:
        return TestResult(0.0, 1.0, "friedman", mean_ranks=ranks.mean(axis=0), n=n)
    chi2 = (12.0 / (n * k * (k + 1)) * float((rank_sums ** 2).sum()) - 3.0 * n * (k + 1)) / correction
    chi2 = max(chi2, 0.0)
    return TestResult(chi2, float(stats.chi2.sf(chi2, k - 1)), "friedman",
                      mean_ranks=ranks.mean(axis=0), n=n)


def conover_posthoc(scores) -> TestResult:
    """Conover-Iman pairwise comparisons on within-row ranks.

    |R_i - R_j| / sqrt(2 (n*A - sum R^2) / ((n-1)(k-1))) is referred to a t
    distribution with (n-1)(k-1) degrees of freedom, where R are column rank
    sums and A is the sum of all squared ranks. Two-sided p-values.
    """
    m = _score_matrix(scores)
    n, k = m.shape
    ranks = stats.rankdata(m, axis=1)
    rank_sums = ranks.sum(axis=0)
    a2 = float((ranks ** 2).sum())
    df = (n - 1) * (k - 1)
    spread = 2.0 * (n * a2 - float((rank_sums ** 2).sum())) / df
    diff = np.abs(rank_sums[:, None] - rank_sums[None, :])
    if spread <= 1e-12:
        t = np.zeros((k, k))
        p = np.ones((k, k))
    else:
        t = diff / math.sqrt(spread)
        p = np.minimum(1.0, 2.0 * stats.t.sf(t, df))
    np.fill_diagonal(p, 1.0)
    omnibus = friedman_test(m)
    return TestResult(omnibus.statistic, omnibus.p_value, "conover", pairwise=p,
                      pairwise_statistic=t, mean_ranks=ranks.mean(axis=0), n=n)


def _exact_upper_tail(doubled_ranks: np.ndarray, observed: int) -> tuple[float, float]:
    """P(W >= w) and P(W <= w) for W = sum of a random-sign subset of the ranks.

    Ranks are passed doubled so mid-ranks stay integral.
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    for r in doubled_ranks.astype(int):
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:total + 1 - r]
        counts = counts + shifted
    counts /= counts.sum()
    return float(counts[observed:].sum()), float(counts[:observed + 1].sum())


def wilcoxon_signed_rank(x, y, alternative: str = "two-sided") -> TestResult:
    """Paired signed-rank test of ``x`` against ``y``.

    ``alternative="greater"`` tests whether x tends to exceed y. Zero
    differences are dropped; tied magnitudes get mid-ranks. The null
    distribution is enumerated exactly for n <= 25 and approximated by a
    normal with tie and continuity correction otherwise.
    """
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return TestResult(0.0, 1.0, "wilcoxon", alternative, n=0)
    if n < 6:
        warnings.warn(f"Wilcoxon test on only {n} non-zero differences", stacklevel=2)
    ranks = stats.rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    if n <= EXACT_MAX_N:
        doubled = np.rint(2 * ranks).astype(int)
        p_ge, p_le = _exact_upper_tail(doubled, int(round(2 * w_plus)))
        method = "wilcoxon-exact"
    else:
        mean = n * (n + 1) / 4.0
        _, counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 - float((counts ** 3 - counts).sum()) / 48.0
        sd = math.sqrt(var)
        p_ge = float(stats.norm.sf((w_plus - mean - 0.5) / sd))
        p_le = float(stats.norm.cdf((w_plus - mean + 0.5) / sd))
        method = "wilcoxon-normal"
    if alternative == "greater":
        p = p_ge
    elif alternative == "less":
        p = p_le
    else:
        p = min(1.0, 2.0 * min(p_ge, p_le))
    return TestResult(w_plus, min(1.0, p), method, alternative, n=n)
