"""Cross-run statistics: summaries, 95% intervals, rank-sum test, settling.

The interval convention here is mu +/- t * sigma over the per-run sample
(NOT the +/- t * sigma / sqrt(n) confidence interval of the mean); the
conventional mean CI is exposed separately as ci95_mean.
"""

import itertools
import math

from scipy.stats import t as t_dist

__all__ = [
    "summary",
    "i95",
    "ci95_mean",
    "wilcoxon_rank_sum",
    "settling_time",
    "midranks",
    "report_row",
    "REPORT_COLUMNS",
]

REPORT_COLUMNS = ("variable", "mu_a", "sigma_a", "mu_b", "sigma_b",
                  "i95_a_lo", "i95_a_hi", "i95_b_lo", "i95_b_hi", "p_value")

EXACT_LIMIT = 12  # exact rank-sum enumeration up to this pooled size


def summary(values):
    """Mean and sample standard deviation (n-1 denominator)."""
    n = len(values)
    if n < 2:
        raise ValueError("need at least 2 values")
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def _t975(df: int) -> float:
    return float(t_dist.ppf(0.975, df))


def i95(values):
    """Interval mu +/- t_{0.975, n-1} * sigma over per-run outcomes."""
    mean, sd = summary(values)
    half = _t975(len(values) - 1) * sd
    return mean - half, mean + half


def ci95_mean(values):
    """Conventional 95% CI of the mean: mu +/- t * sigma / sqrt(n)."""
    mean, sd = summary(values)
    half = _t975(len(values) - 1) * sd / math.sqrt(len(values))
    return mean - half, mean + half


def midranks(values):
    """Fractional ranks (1-based); tied values share the mean rank."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _u_statistic(rank_sum: float, n1: int) -> float:
    return rank_sum - n1 * (n1 + 1) / 2


def _exact_p(pooled_ranks, n1: int, n2: int, u_obs: float, alternative: str):
    """Enumerate all C(n1+n2, n1) assignments of the pooled ranks."""
    total = 0
    extreme = 0
    mu = n1 * n2 / 2
    dev_obs = abs(u_obs - mu)
    for combo in itertools.combinations(range(n1 + n2), n1):
        u = _u_statistic(sum(pooled_ranks[i] for i in combo), n1)
        total += 1
        if alternative == "two_sided":
            if abs(u - mu) >= dev_obs - 1e-12:
                extreme += 1
        else:  # a_greater: evidence is a large U for sample a
            if u >= u_obs - 1e-12:
                extreme += 1
    return extreme / total


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _approx_p(pooled, ranks, n1: int, n2: int, u_obs: float, alternative: str):
    """Normal approximation with tie and continuity corrections."""
    n = n1 + n2
    tie_term = 0.0
    for _, group in itertools.groupby(sorted(pooled)):
        t = len(list(group))
        tie_term += t ** 3 - t
    var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return 1.0  # every pooled value identical
    mu = n1 * n2 / 2
    sd = math.sqrt(var)
    if alternative == "two_sided":
        z = (abs(u_obs - mu) - 0.5) / sd
        return min(1.0, 2.0 * _normal_sf(max(z, 0.0)))
    z = (u_obs - mu - 0.5) / sd
    return _normal_sf(z)


def wilcoxon_rank_sum(a, b, alternative: str = "two_sided") -> float:
    """Rank-sum (Mann-Whitney) p-value with midrank tie handling.

    alternative "a_greater" tests whether sample a is stochastically
    greater than b.  Pooled sizes up to EXACT_LIMIT are enumerated exactly
    (conditional on the observed tie pattern); larger inputs use the
    normal approximation with tie and continuity corrections.
    """
    if alternative not in ("two_sided", "a_greater"):
        raise ValueError(f"unknown alternative {alternative!r}")
    if not a or not b:
        raise ValueError("both samples must be non-empty")
    a = list(a)
    b = list(b)
    n1, n2 = len(a), len(b)
    pooled = a + b
    ranks = midranks(pooled)
    u_obs = _u_statistic(sum(ranks[:n1]), n1)
    if n1 + n2 <= EXACT_LIMIT:
        return _exact_p(ranks, n1, n2, u_obs, alternative)
    return _approx_p(pooled, ranks, n1, n2, u_obs, alternative)


def report_row(variable: str, a_values, b_values,
               alternative: str = "two_sided"):
    """One aggregate-report line comparing per-run outcomes of two variants."""
    mu_a, sd_a = summary(a_values)
    mu_b, sd_b = summary(b_values)
    lo_a, hi_a = i95(a_values)
    lo_b, hi_b = i95(b_values)
    p = wilcoxon_rank_sum(a_values, b_values, alternative)
    return (variable, mu_a, sd_a, mu_b, sd_b, lo_a, hi_a, lo_b, hi_b, p)


def settling_time(series, band: float = 0.05) -> float:
    """First time the series enters and stays within +/-band of its final value.

    The band is relative to |final|; a zero final value falls back to an
    absolute band of `band`.  The series is an ordered sequence of
    (time, value) pairs.
    """
    points = list(series)
    if not points:
        raise ValueError("empty series")
    final = points[-1][1]
    tol = band * abs(final) if final != 0.0 else band
    settle_index = 0
    for i in range(len(points) - 1, -1, -1):
        if abs(points[i][1] - final) > tol:
            settle_index = i + 1
            break
    return points[settle_index][0]
