"""Discrete power-law fitting and likelihood-ratio model comparison.

The exponent estimator is the discrete approximation

    alpha = 1 + n * (sum(log(x_i / (x_min - 1/2))))**-1

over the tail ``x >= x_min``.  When no cutoff is given, it is chosen by
minimising the Kolmogorov-Smirnov distance between the empirical tail and
the fitted model.  Alternatives (discrete exponential, discrete truncated
log-normal) are fitted by maximum likelihood on the same tail and compared
with Vuong's normalised log-likelihood ratio.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy import optimize, special, stats

from ..model import KGError

LOGNORMAL_EXACT_TERMS = 100_000


class DegenerateTail(KGError):
    pass


@dataclass
class LikelihoodComparison:
    R: float
    normalized_R: float
    p_value: float

    @property
    def favors_power_law(self) -> bool:
        return self.R > 0


@dataclass
class PowerLawFit:
    alpha: float
    x_min: int
    ks: float
    n_tail: int
    n: int
    discrete: bool = True
    comparisons: Dict[str, LikelihoodComparison] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha, "x_min": self.x_min, "ks": self.ks, "n_tail": self.n_tail,
            "n": self.n, "discrete": self.discrete,
            "comparisons": {k: {"R": c.R, "normalized_R": c.normalized_R, "p_value": c.p_value}
                            for k, c in sorted(self.comparisons.items())},
        }


def _alpha(tail: np.ndarray, x_min: int, discrete: bool) -> float:
    shift = x_min - 0.5 if discrete else float(x_min)
    return 1.0 + tail.size / np.log(tail / shift).sum()


def _model_ccdf(alpha: float, x_min: int, x: np.ndarray, discrete: bool) -> np.ndarray:
    if discrete:
        return special.zeta(alpha, x) / special.zeta(alpha, x_min)
    return (x / x_min) ** (1.0 - alpha)


def _ks(tail: np.ndarray, alpha: float, x_min: int, discrete: bool) -> float:
    values, counts = np.unique(tail, return_counts=True)
    at_or_above = np.cumsum(counts[::-1])[::-1] / tail.size
    above = at_or_above - counts / tail.size
    points = values.astype(float)
    d1 = np.abs(at_or_above - _model_ccdf(alpha, x_min, points, discrete))
    d2 = np.abs(above - _model_ccdf(alpha, x_min, points + 1.0, discrete))
    return float(min(1.0, max(d1.max(), d2.max())))


def _fit_at(x: np.ndarray, x_min: int, discrete: bool) -> PowerLawFit:
    tail = x[x >= x_min].astype(float)
    if tail.size < 2 or np.unique(tail).size < 2:
        raise DegenerateTail(f"tail above x_min={x_min} has fewer than two distinct values")
    alpha = _alpha(tail, x_min, discrete)
    return PowerLawFit(float(alpha), int(x_min), _ks(tail, alpha, x_min, discrete), int(tail.size),
                       int(x.size), discrete)


def fit_power_law(degrees, x_min: Optional[int] = None, discrete_correction: bool = True,
                  max_quantile: float = 0.9) -> PowerLawFit:
    """Fit a power-law tail to a positive integer sample.

    Args:
        degrees: sample values; zeros are ignored.
        x_min: fixed cutoff.  When None, every distinct observed value up to
            the ``max_quantile`` quantile is tried and the KS-minimal one kept
            (ties go to the smaller cutoff).
        discrete_correction: use ``x_min - 1/2`` and the Hurwitz-zeta model.
            Turning it off gives the continuous estimator, which is exactly
            scale invariant.
    """
    x = np.asarray(degrees)
    x = x[x > 0]
    if x_min is not None:
        if x_min < 1:
            raise ValueError("x_min must be >= 1")
        return _fit_at(x, int(x_min), discrete_correction)
    if x.size == 0:
        raise DegenerateTail("empty sample")
    ceiling = np.quantile(x, max_quantile)
    best: Optional[PowerLawFit] = None
    for candidate in np.unique(x):
        if candidate > ceiling:
            break
        try:
            fit = _fit_at(x, int(candidate), discrete_correction)
        except DegenerateTail:
            continue
        if best is None or fit.ks < best.ks:
            best = fit
    if best is None:
        raise DegenerateTail("no candidate x_min leaves a non-degenerate tail")
    return best


# -- likelihoods ----------------------------------------------------------

def power_law_loglik(x: np.ndarray, alpha: float, x_min: int, discrete: bool = True) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if discrete:
        return -alpha * np.log(x) - np.log(special.zeta(alpha, x_min))
    return np.log((alpha - 1.0) / x_min) - alpha * np.log(x / x_min)


def exponential_loglik(x: np.ndarray, x_min: int) -> np.ndarray:
    """Discrete exponential (shifted geometric) on ``x >= x_min`` at its MLE rate."""
    x = np.asarray(x, dtype=float)
    excess = x.mean() - x_min
    lam = np.log1p(1.0 / excess)
    return np.log(-np.expm1(-lam)) - lam * (x - x_min)


def _lognormal_log_density(x: np.ndarray, mu: float, sigma: float) -> np.ndarray:
    lx = np.log(x)
    return -((lx - mu) ** 2) / (2 * sigma * sigma) - lx - np.log(sigma) - 0.5 * np.log(2 * np.pi)


def _lognormal_log_norm(x_min: int, x_max: int, mu: float, sigma: float) -> float:
    # Exact sum over the first LOGNORMAL_EXACT_TERMS support points; beyond
    # that the sum is replaced by the integral of the density (midpoint rule).
    last = min(x_max, x_min + LOGNORMAL_EXACT_TERMS - 1)
    support = np.arange(x_min, last + 1, dtype=float)
    log_z = special.logsumexp(_lognormal_log_density(support, mu, sigma))
    if last < x_max:
        dist = stats.lognorm(s=sigma, scale=np.exp(mu))
        rest = dist.sf(last + 0.5) - dist.sf(x_max + 0.5)
        if rest > 0:
            log_z = np.logaddexp(log_z, np.log(rest))
    return float(log_z)


def lognormal_loglik(x: np.ndarray, x_min: int) -> np.ndarray:
    """Discrete log-normal truncated to the observed support ``[x_min, max(x)]``."""
    x = np.asarray(x, dtype=float)
    values, counts = np.unique(x, return_counts=True)
    x_max = int(values[-1])
    lx = np.log(x)

    def nll(params):
        mu, log_sigma = params
        sigma = np.exp(log_sigma)
        ll = (counts * _lognormal_log_density(values, mu, sigma)).sum()
        return -(ll - x.size * _lognormal_log_norm(x_min, x_max, mu, sigma))

    start = np.array([lx.mean(), np.log(max(lx.std(), 1e-3))])
    res = optimize.minimize(nll, start, method="Nelder-Mead",
                            options={"xatol": 1e-6, "fatol": 1e-8, "maxiter": 4000})
    mu, sigma = res.x[0], float(np.exp(res.x[1]))
    return _lognormal_log_density(x, mu, sigma) - _lognormal_log_norm(x_min, x_max, mu, sigma)


def vuong_test(loglik_a: np.ndarray, loglik_b: np.ndarray) -> LikelihoodComparison:
    """Normalised log-likelihood ratio with a two-sided normal p-value.

    Positive ``R`` favours model ``a``.
    """
    diff = np.asarray(loglik_a, dtype=float) - np.asarray(loglik_b, dtype=float)
    R = float(diff.sum())
    sigma = float(diff.std())
    n = diff.size
    if sigma == 0.0 or n == 0:
        return LikelihoodComparison(R, 0.0, 1.0 if R == 0.0 else 0.0)
    z = R / (sigma * np.sqrt(n))
    return LikelihoodComparison(R, float(z), float(special.erfc(abs(z) / np.sqrt(2))))


def compare_distributions(degrees, fit: PowerLawFit) -> Dict[str, LikelihoodComparison]:
    """Compare the fitted power law against exponential and log-normal tails.

    The result is also stored on ``fit.comparisons``.
    """
    x = np.asarray(degrees)
    tail = x[x >= fit.x_min].astype(float)
    pl = power_law_loglik(tail, fit.alpha, fit.x_min, fit.discrete)
    out = {
        "exponential": vuong_test(pl, exponential_loglik(tail, fit.x_min)),
        "lognormal": vuong_test(pl, lognormal_loglik(tail, fit.x_min)),
    }
    fit.comparisons = out
    return out


def sample_discrete_power_law(alpha: float, x_min: int, size: int,
                              rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Exact inverse-CDF draws from ``P(x) = x**-alpha / zeta(alpha, x_min)``.

    Each draw is the largest ``x`` with ``P(X >= x) >= u`` for uniform ``u``,
    found by doubling then bisection on the Hurwitz-zeta CCDF.
    """
    rng = np.random.default_rng() if rng is None else rng
    u = 1.0 - rng.random(size)
    u = np.maximum(u, 1e-15)
    norm = special.zeta(alpha, x_min)

    def ccdf(v):
        return special.zeta(alpha, v.astype(float)) / norm

    lo = np.full(size, x_min, dtype=np.int64)
    hi = np.full(size, x_min + 1, dtype=np.int64)
    grow = ccdf(hi) >= u
    while grow.any():
        lo[grow] = hi[grow]
        hi[grow] *= 2
        grow = ccdf(hi) >= u
    while True:
        gap = hi - lo > 1
        if not gap.any():
            return lo
        mid = (lo + hi) // 2
        ok = ccdf(mid) >= u
        lo = np.where(gap & ok, mid, lo)
        hi = np.where(gap & ~ok, mid, hi)
