"""Statistical harness: exponent fits, goodness-of-fit tests, Laplace
comparisons and a dyadic Hölder-constant estimator.

Everything here is a deterministic function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special, stats


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares line through log-log points."""

    slope: float
    intercept: float
    stderr: float
    n: int
    r2: float

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("an exponent fit needs at least 3 points")
        if not self.stderr >= 0:
            raise ValueError("stderr must be nonnegative")

    def within(self, target: float, tol: float) -> bool:
        """Both the value and its precision meet a ``target ± tol`` claim."""
        return abs(self.slope - target) <= tol and self.stderr <= tol / 2

    def to_dict(self) -> dict:
        return asdict(self)


def linear_fit(x, y) -> ExponentFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 3:
        raise ValueError("need at least 3 paired points")
    if np.ptp(x) == 0:
        raise ValueError("x values must not all coincide")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    sse = float(np.sum(resid ** 2))
    syy = float(np.sum((y - ym) ** 2))
    n = x.size
    stderr = np.sqrt(sse / (n - 2) / sxx) if n > 2 else 0.0
    r2 = 1.0 if syy == 0 else max(0.0, 1.0 - sse / syy)
    return ExponentFit(float(slope), float(intercept), float(stderr), int(n), float(r2))


def loglog_fit(x, y) -> ExponentFit:
    """OLS of ``log y`` on ``log x``.

    Raises
    ------
    ValueError
        If any coordinate is not strictly positive.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise ValueError("log-log fit needs strictly positive data")
    return linear_fit(np.log(x), np.log(y))


# ----------------------------------------------------------------------------
# comparisons against closed forms

@dataclass(frozen=True)
class Comparison:
    closed_form: float
    empirical: float
    stderr: float
    z: float
    label: str = ""

    def ok(self, nsigma: float = 3.0) -> bool:
        return abs(self.z) <= nsigma

    def to_dict(self) -> dict:
        return asdict(self)


def compare_mean(values, closed_form: float, label: str = "") -> Comparison:
    """Signed z-score of a sample mean against an exact value."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty sample")
    m = float(v.mean())
    se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0
    diff = m - closed_form
    if se == 0:
        z = 0.0 if diff == 0 else float(np.sign(diff) * np.inf)
    else:
        z = diff / se
    return Comparison(float(closed_form), m, se, float(z), label)


def compare_probability(hits, p: float, label: str = "") -> Comparison:
    """Binomial frequency against ``p`` using the null standard error."""
    h = np.asarray(hits, dtype=bool)
    if h.size == 0:
        raise ValueError("empty sample")
    f = float(h.mean())
    se = float(np.sqrt(p * (1 - p) / h.size))
    z = 0.0 if se == 0 and f == p else (f - p) / se if se > 0 else float(np.inf)
    return Comparison(float(p), f, se, float(z), label)


def laplace_compare(samples, lambdas: Sequence[float], closed_form: Callable[[float], float]
                    ) -> list[Comparison]:
    """Empirical ``E exp(-lam X)`` against ``closed_form(lam)`` for each ``lam``."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample set")
    return [compare_mean(np.exp(-lam * x), float(closed_form(lam)), label=f"lambda={lam!r}")
            for lam in lambdas]


# ----------------------------------------------------------------------------
# goodness of fit

def ks_two_sample(a, b) -> float:
    """p-value of the two-sample Kolmogorov-Smirnov test."""
    return float(stats.ks_2samp(np.asarray(a), np.asarray(b)).pvalue)


def ks_one_sample(a, cdf) -> float:
    return float(stats.kstest(np.asarray(a), cdf).pvalue)


def kolmogorov_pvalue(d: float, n: int) -> float:
    """Asymptotic p-value for the one-sample statistic ``d`` at size ``n``."""
    return float(special.kolmogorov(np.sqrt(n) * d))


def poisson_chisquare(counts, mean: float, min_expected: float = 5.0) -> tuple[float, float]:
    """Chi-square goodness of fit of integer counts to Poisson(``mean``).

    Cells are ``0, 1, ..., K-1`` plus a tail cell ``>= K``; ``K`` is the
    largest value keeping every expected count at least ``min_expected``.

    Returns
    -------
    stat, pvalue
    """
    c = np.asarray(counts, dtype=int)
    n = c.size
    if n == 0:
        raise ValueError("no counts")
    K = 1
    while n * stats.poisson.pmf(K, mean) >= min_expected and \
            n * stats.poisson.sf(K, mean) >= min_expected:
        K += 1
    expected = np.append(n * stats.poisson.pmf(np.arange(K), mean), n * stats.poisson.sf(K - 1, mean))
    observed = np.append(np.bincount(np.minimum(c, K), minlength=K + 1)[:K],
                         np.count_nonzero(c >= K))
    stat = float(np.sum((observed - expected) ** 2 / expected))
    df = len(expected) - 1
    return stat, float(stats.chi2.sf(stat, df))


def exponential_rate(samples) -> tuple[float, float]:
    """MLE rate of an exponential sample and its asymptotic standard error."""
    x = np.asarray(samples, dtype=float)
    rate = 1.0 / x.mean()
    return float(rate), float(rate / np.sqrt(x.size))


def gaussian_tail(lam) -> np.ndarray:
    """``P[Z >= lam]`` for standard normal ``Z``."""
    return 0.5 * special.erfc(np.asarray(lam, dtype=float) / np.sqrt(2.0))


def mills_ratio(lam) -> np.ndarray:
    """Ratio of the Gaussian tail to its first-order asymptote."""
    lam = np.asarray(lam, dtype=float)
    return gaussian_tail(lam) * lam * np.sqrt(2 * np.pi) * np.exp(lam ** 2 / 2)


def poisson_lower_deviation_bound(alpha: float, lam: float) -> float:
    """Chernoff bound ``exp(lam (alpha - alpha log alpha - 1))`` on
    ``P[Poisson(lam) <= alpha lam]`` for ``0 < alpha < 1``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return float(np.exp(lam * (alpha - alpha * np.log(alpha) - 1.0)))


def survival(samples, t) -> np.ndarray:
    """Empirical ``P[X >= t]`` at each threshold."""
    x = np.sort(np.asarray(samples, dtype=float))
    t = np.asarray(t, dtype=float)
    return 1.0 - np.searchsorted(x, t, side="left") / x.size


def gaussian_tail_exponent(samples, thresholds, lower: bool = False) -> ExponentFit:
    """Regress ``log(-log P)`` on ``log|t|`` for tail probabilities.

    For a tail of the form ``c0 exp(-c1 t^2)`` the slope tends to 2.
    With ``lower=True`` the probabilities are ``P[X <= t]`` for negative
    thresholds.
    """
    x = np.asarray(samples, dtype=float)
    t = np.asarray(thresholds, dtype=float)
    p = np.mean(x[None, :] <= t[:, None], axis=1) if lower else survival(x, t)
    keep = (p > 0) & (p < 1)
    if keep.sum() < 3:
        raise ValueError("too few thresholds with informative tail frequencies")
    return loglog_fit(np.abs(t[keep]), -np.log(p[keep]))


# ----------------------------------------------------------------------------
# Hölder constants on dyadic grids

def dyadic_holder_constant(values: np.ndarray, gamma_exp: float) -> float:
    """Largest ``|X_u - X_v| / |u - v|^gamma_exp`` over adjacent pairs of
    every dyadic level.

    ``values`` holds a process on the grid ``{i / 2^k}`` of ``[0, 1]^d``
    (``d`` = 1 or 2), i.e. ``2^k + 1`` points per side.
    """
    v = np.asarray(values, dtype=float)
    m = v.shape[0] - 1
    k = int(round(np.log2(m)))
    if 2 ** k != m or any(s != m + 1 for s in v.shape):
        raise ValueError("values must sit on a 2^k + 1 dyadic grid")
    best = 0.0
    for level in range(1, k + 1):
        step = 2 ** (k - level)
        sub = v[(slice(None, None, step),) * v.ndim]
        scale = 2.0 ** (level * gamma_exp)
        for axis in range(v.ndim):
            d = np.abs(np.diff(sub, axis=axis))
            best = max(best, float(d.max()) * scale)
    return best


@dataclass(frozen=True)
class HolderTail:
    constants: np.ndarray
    thresholds: np.ndarray
    tail: np.ndarray
    fit: Optional[ExponentFit]
    power_law: bool

    @property
    def exponent(self) -> float:
        return float("nan") if self.fit is None else -self.fit.slope


def holder_norm_tail(sampler: Callable[[np.random.Generator], np.ndarray], gamma_exp: float,
                     trials: int, rng: np.random.Generator, thresholds=None,
                     min_r2: float = 0.8) -> HolderTail:
    """Empirical tail of the dyadic Hölder constant of a random process.

    Parameters
    ----------
    sampler
        Draws one realization on a dyadic grid from the given generator.
    gamma_exp
        Hölder exponent.
    thresholds
        Points ``t`` where ``P[M >= t]`` is estimated. Defaults to a
        geometric grid between the median and the largest sample.

    Returns
    -------
    HolderTail
        ``power_law`` is False when the constants are (numerically)
        degenerate or the log-log fit is poor.
    """
    M = np.array([dyadic_holder_constant(sampler(rng), gamma_exp) for _ in range(trials)])
    if thresholds is None:
        lo, hi = np.median(M), M.max()
        thresholds = np.geomspace(lo, hi, 12) if hi > lo > 0 else np.array([lo])
    t = np.asarray(thresholds, dtype=float)
    tail = survival(M, t)
    keep = (tail > 0) & (t > 0)
    fit = None
    power_law = False
    if np.ptp(M) > 1e-9 * max(1.0, abs(M.max())) and keep.sum() >= 3 and np.unique(tail[keep]).size >= 3:
        fit = loglog_fit(t[keep], tail[keep])
        power_law = fit.r2 >= min_r2 and fit.slope < 0
    return HolderTail(M, t, tail, fit, power_law)
