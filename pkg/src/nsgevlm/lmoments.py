"""Population and sample L-moments, L-moment ratios, and stationary
L-moment parameter estimation for the Gumbel and GEV distributions."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._backend import lmom4_sorted
from .distributions import EULER_GAMMA, XI_EPS, GevParams, gev_b

LOG2 = math.log(2.0)
GUMBEL_TAU3 = 2.0 * math.log(3.0) / math.log(2.0) - 3.0  # 0.1699250...
GUMBEL_TAU4 = 16.0 - 10.0 * math.log(3.0) / math.log(2.0)  # 0.1503749...


class InsufficientDataError(ValueError):
    pass


class DegenerateSampleError(ValueError):
    pass


@dataclass(frozen=True)
class LMomentSet:
    """First two L-moments plus L-skewness and L-kurtosis."""

    l1: float
    l2: float
    t3: float
    t4: float
    kind: str = "sample"  # "sample" or "population"
    n: int | None = None

    def as_vector(self) -> np.ndarray:
        return np.array([self.l1, self.l2, self.t3, self.t4])


@dataclass(frozen=True)
class LMomentCovariance:
    """Covariance of the sample L-moment vector (l1, l2, t3, t4)."""

    v: np.ndarray
    n: int
    source: str = "bootstrap"
    warning: str | None = field(default=None, compare=False)

    def regularized_inverse(self) -> np.ndarray:
        reg = 1e-10 * np.trace(self.v) * np.eye(4)
        return np.linalg.inv(self.v + reg)


def sample_lmoments(x) -> LMomentSet:
    """Unbiased sample L-moments of a data vector (n >= 4, nondegenerate)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4:
        raise InsufficientDataError(f"need at least 4 observations, got {n}")
    xs = np.sort(np.ascontiguousarray(x))
    if xs[0] == xs[-1]:
        raise DegenerateSampleError("all sample values are equal")
    l1, l2, l3, l4 = lmom4_sorted(xs)
    if l2 <= 0:
        raise DegenerateSampleError("second sample L-moment is not positive")
    return LMomentSet(l1, l2, l3 / l2, l4 / l2, kind="sample", n=n)


def gumbel_population_lmoments() -> LMomentSet:
    """L-moments of the standard Gumbel: (gamma, log 2, 0.169925, 0.150375)."""
    return LMomentSet(EULER_GAMMA, LOG2, GUMBEL_TAU3, GUMBEL_TAU4,
                      kind="population")


def _gev_tau3(xi: float) -> float:
    if abs(xi) < XI_EPS:
        return GUMBEL_TAU3
    return 2.0 * (1.0 - 3.0**-xi) / (1.0 - 2.0**-xi) - 3.0


def _gev_tau4(xi: float) -> float:
    if abs(xi) < XI_EPS:
        return GUMBEL_TAU4
    return (5.0 * (1.0 - 4.0**-xi) - 10.0 * (1.0 - 3.0**-xi)
            + 6.0 * (1.0 - 2.0**-xi)) / (1.0 - 2.0**-xi)


def gev_lmoments_from_params(p: GevParams) -> LMomentSet:
    """Closed-form population L-moments of GEV(mu, sigma, xi); xi > -1."""
    if p.xi <= -1:
        raise ValueError(f"mean is infinite for xi <= -1 (got {p.xi})")
    l1 = p.mu + p.sigma * gev_b(p.xi)
    if abs(p.xi) < XI_EPS:
        l2 = p.sigma * LOG2
    else:
        l2 = p.sigma * (1.0 - 2.0**-p.xi) * math.gamma(1.0 + p.xi) / p.xi
    return LMomentSet(l1, l2, _gev_tau3(p.xi), _gev_tau4(p.xi),
                      kind="population")


def _xi_from_t3(t3: float) -> float:
    """Solve tau3(xi) = t3 by Newton iteration with bisection fallback.

    Initialized with the classical rational approximation in
    c = 2/(3+t3) - log2/log3; tau3 is monotone decreasing on (-0.99, 0.99).
    """
    if not -1.0 < t3 < 1.0:
        raise ValueError(f"t3 must lie in (-1, 1), got {t3}")
    c = 2.0 / (3.0 + t3) - math.log(2.0) / math.log(3.0)
    xi = 7.8590 * c + 2.9554 * c * c
    lo, hi = -0.99, 0.99
    xi = min(max(xi, lo), hi)
    for _ in range(100):
        f = _gev_tau3(xi) - t3
        if abs(f) < 1e-12:
            break
        h = 1e-7
        df = (_gev_tau3(xi + h) - _gev_tau3(xi - h)) / (2.0 * h)
        step = f / df
        new = xi - step
        if not lo < new < hi:
            # bisection fallback against whichever endpoint brackets
            new = 0.5 * (xi + (lo if f < 0 else hi))
        if abs(new - xi) < 1e-14:
            xi = new
            break
        xi = new
    return xi


def stationary_lme_gev(x) -> GevParams:
    """Stationary GEV fit by matching the first three sample L-moments."""
    lm = sample_lmoments(x)
    xi = _xi_from_t3(lm.t3)
    if abs(xi) < XI_EPS:
        sigma = lm.l2 / LOG2
        mu = lm.l1 - EULER_GAMMA * sigma
        xi = 0.0
    else:
        sigma = lm.l2 * xi / ((1.0 - 2.0**-xi) * math.gamma(1.0 + xi))
        mu = lm.l1 - sigma * gev_b(xi)
    return GevParams(mu, sigma, xi)


def stationary_lme_gumbel(x) -> GevParams:
    """Stationary Gumbel fit: sigma = l2/log2, mu = l1 - gamma*sigma."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("need at least 2 observations")
    xs = np.sort(np.ascontiguousarray(x))
    n = xs.size
    i = np.arange(1.0, n + 1.0)
    b0 = xs.mean()
    b1 = np.dot(i - 1.0, xs) / (n * (n - 1.0))
    l2 = 2.0 * b1 - b0
    if l2 <= 0:
        raise DegenerateSampleError("second sample L-moment is not positive")
    sigma = l2 / LOG2
    return GevParams(b0 - EULER_GAMMA * sigma, sigma, 0.0)


def lmoment_covariance(x, b_reps: int = 500, seed=0,
                       resample_size: int | None = None) -> LMomentCovariance:
    """Nonparametric-bootstrap covariance of (l1, l2, t3, t4).

    ``resample_size`` controls the size of each bootstrap resample
    (defaults to len(x)); model selection uses it to pin the covariance to
    the per-model sample size when x pools several models' residuals.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 8:
        raise InsufficientDataError("need at least 8 observations")
    m = x.size if resample_size is None else int(resample_size)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    stats = np.empty((b_reps, 4))
    for b in range(b_reps):
        xb = rng.choice(x, size=m, replace=True)
        try:
            stats[b] = sample_lmoments(xb).as_vector()
        except DegenerateSampleError:
            stats[b] = np.nan
    stats = stats[~np.isnan(stats).any(axis=1)]
    v = np.cov(stats, rowvar=False)
    warning = None
    if b_reps < 50:
        warning = f"b_reps={b_reps} is below 50; covariance is noisy"
        warnings.warn(warning, stacklevel=2)
    return LMomentCovariance(v=v, n=m, source="bootstrap", warning=warning)
