"""Stationary GEV/Gumbel distribution functions under the Hosking-Wallis
sign convention.

The CDF is F(x) = exp{-(1 - xi*(x-mu)/sigma)^(1/xi)}, so xi < 0 gives a
heavy upper tail and xi > 0 a light or bounded one. This is the opposite
shape sign to Coles (xi_Coles = -xi used here); everything in this package
uses the convention fixed here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286
#: shape values below this magnitude use the Gumbel limit branch, which
#: avoids catastrophic cancellation in expressions like (1 - y**xi)/xi
XI_EPS = 1e-7


class SupportViolationError(ValueError):
    """An argument fell outside the GEV support for the given parameters.

    ``indices`` identifies the offending positions when the input was an
    array; fitters use it to reject parameter proposals.
    """

    def __init__(self, message: str, indices=None):
        super().__init__(message)
        self.indices = indices


@dataclass(frozen=True)
class GevParams:
    """Stationary GEV parameter triple (location, scale, shape)."""

    mu: float
    sigma: float
    xi: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def gev_cdf(x, p: GevParams):
    """GEV cumulative distribution function.

    Outside the support the CDF saturates at 0 or 1 according to the tail
    side (upper endpoint mu + sigma/xi when xi > 0, lower when xi < 0).
    """
    x = np.asarray(x, dtype=float)
    u = (x - p.mu) / p.sigma
    if abs(p.xi) < XI_EPS:
        out = np.exp(-np.exp(-u))
    else:
        w = 1.0 - p.xi * u
        # np.where evaluates both branches, so compute the power only on
        # the in-support part to avoid spurious overflow warnings
        safe = np.where(w > 0, w, 1.0)
        # tiny w with xi < 0 legitimately overflows to inf, and
        # exp(-inf) = 0 is the correct saturated tail value
        with np.errstate(over="ignore"):
            out = np.where(w > 0, np.exp(-safe ** (1.0 / p.xi)),
                           1.0 if p.xi > 0 else 0.0)
    return float(out) if out.ndim == 0 else out


def gev_quantile(q, p: GevParams):
    """GEV quantile function x(q) = mu + (sigma/xi)*(1 - (-log q)^xi)."""
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise ValueError("quantile probability must lie in (0, 1)")
    y = -np.log(q)
    if abs(p.xi) < XI_EPS:
        out = p.mu - p.sigma * np.log(y)
    else:
        out = p.mu + (p.sigma / p.xi) * (1.0 - y**p.xi)
    return float(out) if out.ndim == 0 else out


def gev_rand(n: int, p: GevParams, seed) -> np.ndarray:
    """Draw n GEV variates by inversion of uniforms.

    ``seed`` may be an int (fed to a counter-based Philox stream, so fixed
    seeds reproduce across platforms) or an existing numpy Generator.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _as_generator(seed)
    u = rng.random(n)
    # keep u away from exact 0/1
    u = np.clip(u, 1e-16, 1.0 - 1e-16)
    return gev_quantile(u, p)


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def gumbel_transform(z, p: GevParams):
    """Standardize GEV data to the standard Gumbel scale:
    Ztilde = -(1/xi)*log(1 - xi*(z-mu)/sigma), with the linear limit at xi=0.

    Raises SupportViolationError (carrying the offending indices) when the
    log argument is nonpositive.
    """
    z = np.asarray(z, dtype=float)
    u = (z - p.mu) / p.sigma
    if abs(p.xi) < XI_EPS:
        out = u
    else:
        w = 1.0 - p.xi * u
        bad = w <= 0
        if np.any(bad):
            idx = np.nonzero(np.atleast_1d(bad))[0]
            raise SupportViolationError(
                f"{idx.size} observation(s) outside GEV support", indices=idx)
        out = -np.log(w) / p.xi
    return float(out) if out.ndim == 0 else out


def gumbel_back_transform(ztilde, p: GevParams):
    """Exact inverse of gumbel_transform:
    z = mu + (sigma/xi)*(1 - exp(-xi*ztilde))."""
    zt = np.asarray(ztilde, dtype=float)
    if abs(p.xi) < XI_EPS:
        out = p.mu + p.sigma * zt
    else:
        out = p.mu + (p.sigma / p.xi) * (1.0 - np.exp(-p.xi * zt))
    return float(out) if out.ndim == 0 else out


def gev_b(xi: float) -> float:
    """b(xi) = (1 - Gamma(1+xi))/xi, so that mean = mu + sigma*b(xi)."""
    if abs(xi) < XI_EPS:
        return EULER_GAMMA
    return (1.0 - math.gamma(1.0 + xi)) / xi


def gev_c(xi: float) -> float:
    """c(xi) = xi / sqrt(Gamma(1+2xi) - Gamma(1+xi)^2), so std = sigma/c(xi).

    Requires xi > -0.5 for a finite variance.
    """
    if xi <= -0.5:
        raise ValueError(f"variance is infinite for xi <= -0.5 (got {xi})")
    if abs(xi) < XI_EPS:
        return math.sqrt(6.0) / math.pi
    var = math.gamma(1.0 + 2.0 * xi) - math.gamma(1.0 + xi) ** 2
    return abs(xi) / math.sqrt(var)


def gev_mean_std(p: GevParams) -> tuple[float, float]:
    """Mean and standard deviation of GEV(mu, sigma, xi); xi > -0.5."""
    return p.mu + p.sigma * gev_b(p.xi), p.sigma / gev_c(p.xi)
