"""Descriptive statistics, normality tests, Box-Cox, Mann-Whitney,
proportion tests, and Pearson correlation.

Conventions pinned here (and relied on by the tests):
 - sample (n-1) variance; adjusted Fisher-Pearson skewness; adjusted
   excess kurtosis;
 - quartiles by (n+1) linear interpolation between closest ranks;
 - Mann-Whitney p exact by enumeration for n1+n2 <= 12 with no ties,
   otherwise tie-corrected normal approximation with a 0.5 continuity
   correction toward the null;
 - one-proportion: exact binomial + one-sided Clopper-Pearson bound for
   n <= 200, score test + Wald one-sided bound above that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats as sc_stats

from ..errors import (
    BadInputError,
    DegenerateInputError,
    EmptySampleError,
    NonPositiveError,
    TooFewSamplesError,
)

EXACT_MWU_LIMIT = 12
EXACT_PROPORTION_LIMIT = 200


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    se_mean: float
    stdev: float
    variance: float
    coefvar: float | None
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    data_range: float
    iqr: float
    modes: tuple[float, ...]
    n_for_mode: int
    skewness: float | None
    kurtosis: float | None


def descriptive_stats(samples) -> DescriptiveStats:
    x = np.asarray(list(samples), dtype=float)
    n = x.size
    if n < 2:
        raise TooFewSamplesError("dispersion statistics need at least 2 observations")
    mean = float(x.mean())
    variance = float(x.var(ddof=1))
    stdev = math.sqrt(variance)
    se_mean = stdev / math.sqrt(n)
    coefvar = (stdev / mean) * 100.0 if mean != 0 else None

    q1, median, q3 = (float(np.quantile(x, q, method="weibull")) for q in (0.25, 0.5, 0.75))

    values, counts = np.unique(x, return_counts=True)
    top = int(counts.max())
    if top > 1:
        modes = tuple(float(v) for v, c in zip(values, counts) if c == top)
        n_for_mode = top
    else:
        modes = ()
        n_for_mode = 0

    skewness = kurtosis = None
    if stdev > 0:
        z = (x - mean) / stdev
        if n >= 3:
            skewness = float(n / ((n - 1) * (n - 2)) * np.sum(z ** 3))
        if n >= 4:
            kurtosis = float(
                n * (n + 1) / ((n - 1) * (n - 2) * (n - 3)) * np.sum(z ** 4)
                - 3 * (n - 1) ** 2 / ((n - 2) * (n - 3))
            )

    return DescriptiveStats(
        n=n, mean=mean, se_mean=se_mean, stdev=stdev, variance=variance,
        coefvar=coefvar, minimum=float(x.min()), q1=q1, median=median, q3=q3,
        maximum=float(x.max()), data_range=float(x.max() - x.min()), iqr=q3 - q1,
        modes=modes, n_for_mode=n_for_mode, skewness=skewness, kurtosis=kurtosis,
    )


@dataclass(frozen=True)
class NormalitySuite:
    anderson_darling: tuple[float, float]  # (statistic, p)
    lilliefors_ks: tuple[float, float]


def _anderson_darling_normal(x: np.ndarray) -> tuple[float, float]:
    """AD statistic against a normal with estimated parameters, with the
    small-sample correction and the Stephens/D'Agostino p-value map."""
    n = x.size
    y = np.sort(x)
    z = sc_stats.norm.cdf((y - y.mean()) / y.std(ddof=1))
    z = np.clip(z, 1e-12, 1 - 1e-12)
    i = np.arange(1, n + 1)
    a2 = -n - np.mean((2 * i - 1) * (np.log(z) + np.log(1 - z[::-1])))
    a2_star = a2 * (1 + 0.75 / n + 2.25 / n ** 2)
    if a2_star >= 0.6:
        p = math.exp(1.2937 - 5.709 * a2_star + 0.0186 * a2_star ** 2)
    elif a2_star >= 0.34:
        p = math.exp(0.9177 - 4.279 * a2_star - 1.38 * a2_star ** 2)
    elif a2_star > 0.2:
        p = 1 - math.exp(-8.318 + 42.796 * a2_star - 59.938 * a2_star ** 2)
    else:
        p = 1 - math.exp(-13.436 + 101.14 * a2_star - 223.73 * a2_star ** 2)
    return float(a2), float(min(max(p, 0.0), 1.0))


def normality_suite(samples) -> NormalitySuite:
    x = np.asarray(list(samples), dtype=float)
    if x.size < 8:
        raise TooFewSamplesError("normality tests need at least 8 observations")
    from statsmodels.stats.diagnostic import lilliefors

    ks_stat, ks_p = lilliefors(x, dist="norm")
    return NormalitySuite(
        anderson_darling=_anderson_darling_normal(x),
        lilliefors_ks=(float(ks_stat), float(ks_p)),
    )


def box_cox(samples, shift_policy: str = "off", shift_value: float = 0.1,
            lmbda: float | None = None) -> tuple[np.ndarray, float]:
    """Power-transform ``samples``; lambda by profile log-likelihood over
    [-5, 5] unless forced.

    shift_policy "replace" substitutes ``shift_value`` for non-positive
    observations before transforming; "off" raises NonPositiveError
    instead.
    """
    x = np.asarray(list(samples), dtype=float)
    if x.size == 0:
        raise EmptySampleError("no observations")
    if shift_policy == "replace":
        x = np.where(x <= 0, shift_value, x)
    elif np.any(x <= 0):
        raise NonPositiveError("data contain non-positive values and shifting is off")

    log_x = np.log(x)

    def transform(lam: float) -> np.ndarray:
        if lam == 0:
            return log_x.copy()
        return (np.power(x, lam) - 1.0) / lam

    if lmbda is not None:
        return transform(lmbda), float(lmbda)

    n = x.size

    def neg_llf(lam: float) -> float:
        y = transform(lam)
        var = y.var()  # MLE variance
        if var <= 0:
            return math.inf
        return -((lam - 1) * log_x.sum() - n / 2 * math.log(var))

    result = optimize.minimize_scalar(neg_llf, bounds=(-5.0, 5.0), method="bounded")
    lam_hat = float(result.x)
    return transform(lam_hat), lam_hat


@dataclass(frozen=True)
class MwuResult:
    w: float  # rank-sum of the first sample
    u1: float  # pairs where the first sample wins (+ half ties)
    u2: float
    p_value: float
    p_value_tie_adjusted: float
    method: str  # "exact" | "normal"
    hodges_lehmann_estimate: float
    one_sided_lower_bound: float
    rank_biserial: float
    alternative: str

    @property
    def u(self) -> float:
        return self.u1


def _midranks(pooled: np.ndarray) -> np.ndarray:
    order = np.argsort(pooled, kind="mergesort")
    ranks = np.empty(pooled.size, dtype=float)
    i = 0
    while i < pooled.size:
        j = i
        while j + 1 < pooled.size and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _exact_u_counts(n1: int, n2: int) -> list[int]:
    """Distribution of U over all C(n1+n2, n1) rank assignments (no ties):
    counts[u] = number of assignments with U = u, via the classic
    N(u; m, n) = N(u - n; m - 1, n) + N(u; m, n - 1) recurrence."""
    tables: dict[tuple[int, int], list[int]] = {}
    for m in range(n1 + 1):
        for n in range(n2 + 1):
            if m == 0 or n == 0:
                tables[m, n] = [1]
                continue
            counts = [0] * (m * n + 1)
            with_last = tables[m - 1, n]   # largest rank in sample 1: adds n to U
            without = tables[m, n - 1]     # largest rank in sample 2: U unchanged
            for u in range(len(counts)):
                if 0 <= u - n < len(with_last):
                    counts[u] += with_last[u - n]
                if u < len(without):
                    counts[u] += without[u]
            tables[m, n] = counts
    return tables[n1, n2]


def _exact_u_cdf(n1: int, n2: int):
    counts = _exact_u_counts(n1, n2)
    total = math.comb(n1 + n2, n1)
    cumulative = []
    running = 0
    for c in counts:
        running += c
        cumulative.append(running / total)
    return cumulative


def mann_whitney(a, b, alternative: str = "two-sided", alpha: float = 0.05) -> MwuResult:
    """Two-sample Mann-Whitney with Hodges-Lehmann shift estimate.

    ``alternative`` is about the first sample's location: "less" means a
    is shifted below b, "greater" above, "two-sided" either way. The
    one-sided bound is a lower bound on loc(a) - loc(b) for "greater"
    (and two-sided, at level alpha) and an upper bound for "less".
    """
    x = np.asarray(list(a), dtype=float)
    y = np.asarray(list(b), dtype=float)
    if x.size == 0 or y.size == 0:
        raise EmptySampleError("both samples must be non-empty")
    if alternative not in ("two-sided", "less", "greater"):
        raise ValueError(f"unknown alternative {alternative!r}")
    n1, n2 = x.size, y.size
    pooled = np.concatenate([x, y])
    ranks = _midranks(pooled)
    w = float(ranks[:n1].sum())
    u1 = w - n1 * (n1 + 1) / 2
    u2 = n1 * n2 - u1

    has_ties = np.unique(pooled).size < pooled.size
    exact_ok = (n1 + n2) <= EXACT_MWU_LIMIT and not has_ties

    if exact_ok:
        cdf = _exact_u_cdf(n1, n2)
        u_int = int(round(u1))

        def p_le(u):  # P(U1 <= u)
            return cdf[u] if u >= 0 else 0.0

        def p_ge(u):  # P(U1 >= u)
            return 1.0 - (cdf[u - 1] if u - 1 >= 0 else 0.0)

        if alternative == "less":
            p = p_le(u_int)
        elif alternative == "greater":
            p = p_ge(u_int)
        else:
            p = min(1.0, 2 * min(p_le(u_int), p_ge(u_int)))
        p_adjusted = p
        method = "exact"
    else:
        mu = n1 * n2 / 2
        base_var = n1 * n2 * (n1 + n2 + 1) / 12

        def p_from(sd):
            if sd == 0:
                return 1.0
            if alternative == "less":
                return float(sc_stats.norm.cdf((u1 - mu + 0.5) / sd))
            if alternative == "greater":
                return float(sc_stats.norm.sf((u1 - mu - 0.5) / sd))
            z = (u1 - mu + (0.5 if u1 < mu else -0.5)) / sd
            return float(min(1.0, 2 * sc_stats.norm.sf(abs(z))))

        p = p_from(math.sqrt(base_var))
        n_total = n1 + n2
        _, tie_counts = np.unique(pooled, return_counts=True)
        tie_term = float(np.sum(tie_counts ** 3 - tie_counts))
        tie_var = base_var * (1 - tie_term / (n_total ** 3 - n_total))
        p_adjusted = p_from(math.sqrt(tie_var))
        method = "normal"

    differences = np.sort((x[:, None] - y[None, :]).ravel())
    hl = float(np.median(differences))

    # distribution-free bound on the shift via the ordered pairwise differences
    m = n1 * n2
    if exact_ok:
        cdf = _exact_u_cdf(n1, n2)
        c = -1
        for u in range(m + 1):
            if cdf[u] <= alpha:
                c = u
            else:
                break
    else:
        z_crit = float(sc_stats.norm.ppf(1 - alpha))
        c = int(math.floor(n1 * n2 / 2 - 0.5 - z_crit * math.sqrt(n1 * n2 * (n1 + n2 + 1) / 12)))
    k = max(c + 1, 1)
    if alternative == "less":
        bound = float(differences[m - k])  # upper bound
    else:
        bound = float(differences[k - 1])  # lower bound

    rank_biserial = float(2 * u1 / m - 1)

    return MwuResult(
        w=w, u1=float(u1), u2=float(u2),
        p_value=float(p), p_value_tie_adjusted=float(p_adjusted), method=method,
        hodges_lehmann_estimate=hl, one_sided_lower_bound=bound,
        rank_biserial=rank_biserial, alternative=alternative,
    )


@dataclass(frozen=True)
class ProportionResult:
    successes: int
    n: int
    sample_p: float
    p_value: float
    lower_bound: float
    method: str  # "exact" | "normal"
    alternative: str
    alpha: float


def one_proportion(successes: int, n: int, p0: float,
                   alternative: str = "greater", alpha: float = 0.05) -> ProportionResult:
    """One-proportion test with a one-sided lower confidence bound.

    n <= 200: exact binomial p plus the one-sided Clopper-Pearson bound
    (successes = n gives exactly alpha**(1/n)). Larger n: score-test p
    plus the Wald bound.
    """
    if not (isinstance(successes, int) and isinstance(n, int)):
        raise BadInputError("successes and n must be integers")
    if not 0 <= successes <= n or n < 1:
        raise BadInputError("need 0 <= successes <= n and n >= 1")
    if not 0 < p0 < 1:
        raise BadInputError("p0 must be inside (0, 1)")
    if alternative not in ("greater", "less", "two-sided"):
        raise BadInputError(f"unknown alternative {alternative!r}")

    sample_p = successes / n
    if n <= EXACT_PROPORTION_LIMIT:
        method = "exact"
        if alternative == "greater":
            p_value = float(sc_stats.binom.sf(successes - 1, n, p0))
        elif alternative == "less":
            p_value = float(sc_stats.binom.cdf(successes, n, p0))
        else:
            p_value = float(min(1.0, 2 * min(
                sc_stats.binom.sf(successes - 1, n, p0),
                sc_stats.binom.cdf(successes, n, p0),
            )))
        if successes == 0:
            lower = 0.0
        elif successes == n:
            lower = alpha ** (1.0 / n)  # Beta(n, 1) quantile in closed form
        else:
            lower = float(sc_stats.beta.ppf(alpha, successes, n - successes + 1))
    else:
        method = "normal"
        z = (sample_p - p0) / math.sqrt(p0 * (1 - p0) / n)
        if alternative == "greater":
            p_value = float(sc_stats.norm.sf(z))
        elif alternative == "less":
            p_value = float(sc_stats.norm.cdf(z))
        else:
            p_value = float(min(1.0, 2 * sc_stats.norm.sf(abs(z))))
        z_crit = float(sc_stats.norm.ppf(1 - alpha))
        lower = max(0.0, sample_p - z_crit * math.sqrt(sample_p * (1 - sample_p) / n))

    return ProportionResult(
        successes=successes, n=n, sample_p=sample_p, p_value=p_value,
        lower_bound=lower, method=method, alternative=alternative, alpha=alpha,
    )


def pearson_correlation(x, y) -> float:
    xs = np.asarray(list(x), dtype=float)
    ys = np.asarray(list(y), dtype=float)
    if xs.size != ys.size or xs.size < 3:
        raise DegenerateInputError("need equal-length samples of at least 3")
    if xs.std() == 0 or ys.std() == 0:
        raise DegenerateInputError("zero variance in one of the samples")
    return float(np.corrcoef(xs, ys)[0, 1])
