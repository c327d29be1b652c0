"""Return levels and calibration diagnostics: conventional time-indexed
return levels, the constant expected-number-of-events return level, the
chi exceedance-calibration distance, and plot-data tables."""
from __future__ import annotations

import numpy as np

from .distributions import GevParams, gev_cdf, gev_quantile
from .models import FitResult, ModelSpec, NsGevParams
from .series import AnnualSeries
from .solvers import BracketError, brent_root


def _quantile_arrays(q: float, mu: np.ndarray, sigma: np.ndarray,
                     xi: float) -> np.ndarray:
    y = -np.log(q)
    if abs(xi) < 1e-7:
        return mu - sigma * np.log(y)
    return mu + (sigma / xi) * (1.0 - y**xi)


def conventional_rl(params: NsGevParams, spec: ModelSpec, T: float,
                    t_range) -> np.ndarray:
    """Per-time conventional T-year return level: the 1 - 1/T quantile of
    the model at each t."""
    if T <= 1:
        raise ValueError("return period must exceed 1 year")
    mu, sigma = params.evaluate(*spec.matrices_at_t(t_range))
    return _quantile_arrays(1.0 - 1.0 / T, mu, sigma, params.xi)


def parey_rl(params: NsGevParams, spec: ModelSpec, T: int) -> float:
    """Constant return level whose expected exceedance count over years
    t = 1..T equals one: solves sum_t (1 - F_t(r)) = 1.

    Trends are extrapolated beyond the observed record when T > n.
    """
    if T < 1:
        raise ValueError("return period must be at least 1 year")
    t = np.arange(1, T + 1, dtype=float)
    mu, sigma = params.evaluate(*spec.matrices_at_t(t))
    xi = params.xi

    def expected_exceedances(r: float) -> float:
        total = 0.0
        for m, s in zip(mu, sigma):
            total += 1.0 - gev_cdf(r, GevParams(m, s, xi))
        return total - 1.0

    q_lo = max(1.0 - 10.0 / T, 0.5)
    lo = float(np.min(_quantile_arrays(q_lo, mu, sigma, xi)))
    hi = float(np.max(_quantile_arrays(1.0 - 1.0 / (10.0 * T), mu, sigma, xi)))
    span = max(hi - lo, 1e-6)
    for _ in range(60):
        if expected_exceedances(lo) > 0 > expected_exceedances(hi):
            return brent_root(expected_exceedances, lo, hi, tol=1e-10)
        lo -= span
        hi += span
        span *= 2.0
        if xi > 0:
            # bounded upper tails: cap the bracket at the support supremum
            bound = float(np.max(mu + sigma / xi))
            if hi > bound:
                hi = np.nextafter(bound, -np.inf)
    raise BracketError(
        "could not bracket the expected-exceedance root; the model's "
        f"support bound (~{np.max(mu + sigma / xi) if xi > 0 else np.inf:.4g}) "
        "may make the target unattainable")


def chi_distance(series: AnnualSeries, fit: FitResult,
                 periods=None) -> float:
    """Exceedance-calibration distance
    chi = sum_i |E(i) - S(i)| / E(i), E(i) = n/T_i,
    with S(i) counting observations at or above their own time's
    conventional T_i-year level."""
    mu, sigma = fit.params_at(series)
    return chi_from_values(series.values, mu, sigma, fit.params.xi, periods)


def chi_from_values(x, mu, sigma, xi: float, periods=None) -> float:
    """chi computed directly from per-observation (mu_t, sigma_t)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if periods is None:
        periods = (5, 10, 20, 40, int(round(1.6 * n)))
    chi = 0.0
    for T in periods:
        q = _quantile_arrays(1.0 - 1.0 / T, np.asarray(mu), np.asarray(sigma),
                             xi)
        s = float(np.sum(x >= q))
        e = n / T
        chi += abs(e - s) / e
    return chi


def modified_rl_plot_data(fit: FitResult, series: AnnualSeries, T_grid):
    """Data for the modified return-level plot: the constant
    expected-number-of-events level at each T, plus Gringorten plotting
    positions mapping each ordered observation to an empirical T."""
    curve = [(float(T), parey_rl(fit.params, fit.spec, int(T)))
             for T in T_grid]
    xs = np.sort(series.values)
    n = xs.size
    pos = (np.arange(1, n + 1) - 0.44) / (n + 0.12)
    obs = list(zip(1.0 / (1.0 - pos), xs))
    return {"curve": curve, "observations": obs}


def qq_plot_data(fit: FitResult):
    """(theoretical standard-Gumbel quantile, ordered standardized
    residual) pairs at plotting positions i/(n+1)."""
    r = np.sort(np.asarray(fit.std_residuals, dtype=float))
    n = r.size
    p = np.arange(1, n + 1) / (n + 1.0)
    theo = -np.log(-np.log(p))
    return list(zip(theo, r))


def stationary_rl(params: GevParams, T: float) -> float:
    """Convenience: stationary T-year return level (both definitions agree)."""
    return float(gev_quantile(1.0 - 1.0 / T, params))
