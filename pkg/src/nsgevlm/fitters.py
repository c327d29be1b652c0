"""The estimation methods for nonstationary GEV models: stationary
L-moment fits, nonstationary MLE, the weighted-least-squares method, the
detrend-and-rescale method backed by temporal-moment relations (GN16),
and the robust-regression + standard-Gumbel L-moment method (PROP),
including its physical-covariate generalization."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import gumbel_residual
from .distributions import (XI_EPS, GevParams, SupportViolationError, gev_b,
                            gev_c, gumbel_transform)
from .lmoments import stationary_lme_gev, stationary_lme_gumbel
from .models import FitResult, ModelSpec, NsGevParams
from .regression import mm_robust_fit, ols_fit, sen_fit, wls_fit
from .returns import chi_from_values
from .series import AnnualSeries
from .solvers import DomainViolation, multistart_solve, nelder_mead

#: guard added inside log() when regressing the absolute pseudo-residuals
LOG_GUARD = 1e-12


def _intercept_design(mat: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(mat.shape[0]), mat])


def _location_regression(series: AnnualSeries, spec: ModelSpec, robust: bool):
    """Trend fit of the observations on the location regressors.

    GEV10 always uses Sen's estimator; GEV20 always uses the MM robust
    fit; GEV11 and covariate specs use OLS unless ``robust``.
    """
    y = series.values
    Xl = spec.location_matrix(series)
    if spec.family == "gev10":
        return sen_fit(Xl[:, 0], y)
    X = _intercept_design(Xl)
    if spec.family == "gev20" or robust:
        return mm_robust_fit(X, y)
    return ols_fit(X, y)


def _scale_regression(eps_abs: np.ndarray, Xls: np.ndarray, robust: bool):
    """Fit the absolute pseudo-residuals to sigma = exp(s0 + s.x).

    Non-robust path: log-linear OLS initialization followed by nonlinear
    least squares on the original scale (a pure log-scale fit biases the
    intercept low by E log|x| - log E|x|, which the detrend-and-rescale
    method would inherit directly). Robust path: MM regression on the log
    scale; only the slope survives into the proposed method, so the
    intercept offset is harmless there.
    """
    from scipy.optimize import least_squares

    logged = np.log(eps_abs + LOG_GUARD)
    X = _intercept_design(Xls)
    if robust and X.shape[1] > 1:
        return mm_robust_fit(X, logged)
    init = ols_fit(X, logged)

    def resid(c):
        return np.exp(np.clip(X @ c, -700, 50)) - eps_abs

    res = least_squares(resid, init.coef, method="lm", max_nfev=200)
    coef = init.coef
    if res.success and np.all(np.isfinite(res.x)):
        lin = X @ res.x
        # reject divergent refinements (runaway scale trends)
        if (lin.max() - lin.min() <= 10.0
                and np.sum(res.fun**2) <= np.sum(resid(init.coef)**2)):
            coef = res.x
    from .regression import RegressionFit

    return RegressionFit(coef=coef, residuals=logged - X @ coef,
                         method="nls-exp")


def _std_residuals(y: np.ndarray, mu: np.ndarray, sigma: np.ndarray,
                   xi: float) -> tuple[np.ndarray, bool]:
    """Gumbel-standardize y under per-observation parameters; clamps (and
    flags) observations the fitted support fails to cover."""
    u = (y - mu) / sigma
    if abs(xi) < XI_EPS:
        return u, False
    w = 1.0 - xi * u
    violated = bool(np.any(w <= 0))
    return -np.log(np.maximum(w, 1e-12)) / xi, violated


def _result(method: str, spec: ModelSpec, params: NsGevParams,
            series: AnnualSeries, **diag) -> FitResult:
    mu, sigma = params.evaluate(spec.location_matrix(series),
                                spec.logscale_matrix(series))
    zt, violated = _std_residuals(series.values, mu, sigma, params.xi)
    diag.setdefault("status", "converged")
    diag["n"] = series.n
    if violated:
        diag["residual_support_violation"] = True
    diag.setdefault("chi", chi_from_values(series.values, mu, sigma, params.xi))
    return FitResult(method=method, spec=spec, params=params,
                     std_residuals=zt, diagnostics=diag)


# ---------------------------------------------------------------------------
# stationary fits

def fit_stationary(series: AnnualSeries, family: str = "gev") -> FitResult:
    """Stationary L-moment fit (family 'gev' or 'gumbel')."""
    if family == "gumbel":
        st = stationary_lme_gumbel(series.values)
        method = "LME-STA-GUM"
    elif family == "gev":
        st = stationary_lme_gev(series.values)
        method = "LME-STA-GEV"
    else:
        raise ValueError(f"unknown stationary family {family!r}")
    params = NsGevParams([st.mu], [math.log(st.sigma)], st.xi)
    return _result(method, ModelSpec("stationary"), params, series)


# ---------------------------------------------------------------------------
# nonstationary MLE

def _nll_factory(series: AnnualSeries, spec: ModelSpec):
    y = series.values
    Xl = spec.location_matrix(series)
    Xs = spec.logscale_matrix(series)
    kl, ks = Xl.shape[1], Xs.shape[1]

    def nll(theta: np.ndarray) -> float:
        mu = theta[0] + Xl @ theta[1:1 + kl]
        logsig = theta[1 + kl] + Xs @ theta[2 + kl:2 + kl + ks]
        xi = theta[2 + kl + ks]
        if abs(xi) > 0.98 or np.any(logsig > 50):
            return np.inf
        sigma = np.exp(logsig)
        u = (y - mu) / sigma
        if abs(xi) < XI_EPS:
            return float(np.sum(logsig + u + np.exp(-u)))
        w = 1.0 - xi * u
        if np.any(w <= 0):
            return np.inf
        return float(np.sum(logsig + (1.0 - 1.0 / xi) * np.log(w)
                            + w ** (1.0 / xi)))

    return nll, kl, ks


def fit_mle(series: AnnualSeries, spec: ModelSpec) -> FitResult:
    """Maximum likelihood fit by Nelder-Mead, initialized at the
    stationary L-moment estimate with zero trend coefficients."""
    st = stationary_lme_gev(series.values)
    nll, kl, ks = _nll_factory(series, spec)
    theta0 = np.concatenate([[st.mu], np.zeros(kl),
                             [math.log(st.sigma)], np.zeros(ks),
                             [st.xi]])
    scale = np.empty_like(theta0)
    scale[0] = 0.25 * st.sigma
    for j, name in enumerate(spec.location_terms):
        spread = np.std(series.term(name)) or 1.0
        scale[1 + j] = 0.25 * st.sigma / spread
    scale[1 + kl] = 0.25
    for j, name in enumerate(spec.logscale_terms):
        spread = np.std(series.term(name)) or 1.0
        scale[2 + kl + j] = 0.25 / spread
    scale[-1] = 0.1
    x, ok = nelder_mead(nll, theta0, scale=scale, tol=1e-10)
    # one polish restart from the first optimum
    x, ok2 = nelder_mead(nll, x, scale=scale * 0.1, tol=1e-12)
    params = NsGevParams(x[:1 + kl], x[1 + kl:2 + kl + ks], float(x[-1]))
    return _result("MLE", spec, params, series,
                   status="converged" if (ok or ok2) else "max-iter",
                   nll=float(nll(x)))


# ---------------------------------------------------------------------------
# WLS

def fit_wls(series: AnnualSeries, spec: ModelSpec,
            robust: bool = False) -> FitResult:
    """Weighted-least-squares method: trend fit, variance-stabilizing
    reweighted refit, stationary L-moments of the standardized residuals,
    and closed-form recovery of the nonstationary parameters."""
    if spec.family == "covariate":
        raise ValueError("covariate specs are fitted by fit_prop_covariate")
    y = series.values
    loc = _location_regression(series, spec, robust)
    eps = loc.residuals
    if spec.logscale_terms:
        Xls = spec.logscale_matrix(series)
        sc = _scale_regression(np.abs(eps - eps.mean()), Xls, robust)
        sigma_hat = np.exp(sc.coef[0] + Xls @ sc.coef[1:])
        Xloc = _intercept_design(spec.location_matrix(series))
        refit = wls_fit(Xloc, y, 1.0 / sigma_hat**2)
        zprime = (y - Xloc @ refit.coef) / sigma_hat
        st = stationary_lme_gev(zprime)
        params = NsGevParams(
            mu_coef=refit.coef,
            logsigma_coef=np.concatenate([[sc.coef[0] + math.log(st.sigma)],
                                          sc.coef[1:]]),
            xi=st.xi,
            mu_sigma_mult=st.mu / st.sigma,
        )
    else:
        # constant scale: reweighting is a no-op, standardization cancels
        st = stationary_lme_gev(eps)
        mu_coef = loc.coef.copy()
        mu_coef[0] += st.mu
        params = NsGevParams(mu_coef, [math.log(st.sigma)], st.xi)
    return _result("WLS", spec, params, series)


def linearized_location(params: NsGevParams, spec: ModelSpec,
                        n: int) -> np.ndarray:
    """Two-coefficient (intercept, slope-per-term) summary of an exact
    nonlinear location function, by OLS of mu(t) over t = 1..n."""
    t = np.arange(1, n + 1, dtype=float)
    mu, _ = params.evaluate(*spec.matrices_at_t(t))
    loc_cols, _ = spec.matrices_at_t(t)
    X = _intercept_design(loc_cols)
    fit = ols_fit(X, mu)
    return fit.coef


# ---------------------------------------------------------------------------
# GN16

@dataclass(frozen=True)
class _TrendPipeline:
    params: NsGevParams
    loc_coef: np.ndarray
    scale_coef: np.ndarray  # empty slopes for constant-scale specs
    xi: float
    diagnostics: dict


def _gn16_pipeline(series: AnnualSeries, spec: ModelSpec,
                   robust: bool) -> _TrendPipeline:
    y = series.values
    loc = _location_regression(series, spec, robust)
    eps = loc.residuals
    diag: dict = {}
    if spec.logscale_terms:
        Xls = spec.logscale_matrix(series)
        sc = _scale_regression(np.abs(eps - eps.mean()), Xls, robust)
        sigma_hat = np.exp(sc.coef[0] + Xls @ sc.coef[1:])
        s1 = sc.coef[1]
        sign = 1.0 if s1 > 0 else -1.0
        if s1 == 0.0:
            diag["sign_ambiguous"] = True
        q = np.where(eps >= eps.mean(), eps - sign * sigma_hat,
                     eps + sign * sigma_hat)
        st = stationary_lme_gev(q)
        xi = st.xi
        if xi <= -0.5:
            raise ValueError(
                f"temporal-moment relations need xi > -0.5, got {xi:.3f}")
        params = NsGevParams(
            mu_coef=loc.coef,
            logsigma_coef=np.concatenate([[sc.coef[0] + math.log(gev_c(xi))],
                                          sc.coef[1:]]),
            xi=xi,
            mu_sigma_mult=-gev_b(xi),
        )
        diag["sign"] = sign
        return _TrendPipeline(params, loc.coef, sc.coef, xi, diag)
    # constant scale: the detrended residuals are already stationary
    st = stationary_lme_gev(eps)
    mu_coef = loc.coef.copy()
    mu_coef[0] += st.mu
    params = NsGevParams(mu_coef, [math.log(st.sigma)], st.xi)
    return _TrendPipeline(params, loc.coef, np.array([math.log(st.sigma)]),
                          st.xi, diag)


def fit_gn16(series: AnnualSeries, spec: ModelSpec,
             robust: bool = False) -> FitResult:
    """Detrend-and-rescale method: trend and scale regressions, stationary
    L-moments of rescaled pseudo-residuals, and parameter recovery through
    the temporal-moment relations b(xi), c(xi)."""
    if spec.family == "covariate":
        raise ValueError("covariate specs are fitted by fit_prop_covariate")
    pipe = _gn16_pipeline(series, spec, robust)
    return _result("GN16", spec, pipe.params, series, **pipe.diagnostics)


# ---------------------------------------------------------------------------
# proposed method: robust trend + standard-Gumbel L-moment matching

def _start_points(mu0: float, sigma0: float, xi0: float) -> list[np.ndarray]:
    """20 deterministic starts: the trend-pipeline point plus jitters in
    each coordinate."""
    s = math.exp(sigma0)
    starts = [np.array([mu0, sigma0, xi0])]
    for d in (0.5, 1.0, 2.0):
        starts.append(np.array([mu0 + d * s, sigma0, xi0]))
        starts.append(np.array([mu0 - d * s, sigma0, xi0]))
    for d in (0.1, 0.3, 0.5):
        starts.append(np.array([mu0, sigma0 + d, xi0]))
        starts.append(np.array([mu0, sigma0 - d, xi0]))
    for xg in (-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3):
        starts.append(np.array([mu0, sigma0, xg]))
    return starts


def _solve_gumbel_match(y: np.ndarray, Xl: np.ndarray, Xs: np.ndarray,
                        mu_slopes: np.ndarray, sigma_slopes: np.ndarray,
                        starts: list[np.ndarray]):
    """Solve for (mu0, sigma0, xi) so the first three sample L-moments of
    the standardized residuals hit the standard-Gumbel targets, with the
    slope coefficients frozen."""
    mu_part = Xl @ mu_slopes if mu_slopes.size else 0.0
    logsig_part = Xs @ sigma_slopes if sigma_slopes.size else 0.0

    def residual(x: np.ndarray) -> np.ndarray:
        mu0, sigma0, xi = x
        if abs(xi) >= 1.0 or abs(sigma0) > 50:
            raise DomainViolation("parameter out of range")
        mu = np.ascontiguousarray(mu0 + mu_part + np.zeros_like(y))
        sigma = np.ascontiguousarray(np.exp(sigma0 + logsig_part)
                                     + np.zeros_like(y))
        res = gumbel_residual(np.ascontiguousarray(y), mu, sigma, float(xi))
        if res is None:
            raise DomainViolation("support violation")
        return np.array(res)

    return multistart_solve(residual, starts, tol=1e-9, max_iter=100)


def _select_root(outcomes, y, mu_part, logsig_part, mu_slopes_n, spec):
    """Among converged roots, pick the one with minimal chi distance."""
    best = None
    best_chi = np.inf
    for out in outcomes:
        mu0, sigma0, xi = out.root
        mu = mu0 + mu_part + np.zeros_like(y)
        sigma = np.exp(sigma0 + logsig_part) + np.zeros_like(y)
        c = chi_from_values(y, mu, sigma, float(xi))
        if c < best_chi:
            best, best_chi = out, c
    return best, best_chi


def fit_prop(series: AnnualSeries, spec: ModelSpec) -> FitResult:
    """Proposed method: robust-regression trend pipeline, then update
    (mu0, sigma0, xi) so the standardized residuals match the
    standard-Gumbel L-moments, keeping the slope coefficients frozen."""
    if spec.family == "covariate":
        return fit_prop_covariate(series, spec)
    pipe = _gn16_pipeline(series, spec, robust=True)
    y = series.values
    Xl = spec.location_matrix(series)
    Xs = spec.logscale_matrix(series)
    mu_slopes = pipe.loc_coef[1:]
    sigma_slopes = pipe.scale_coef[1:] if spec.logscale_terms else np.empty(0)
    # base start: the trend-pipeline estimate expressed in the plain
    # (intercept, slopes) parameterization
    mu_obs, sigma_obs = pipe.params.evaluate(Xl, Xs)
    mu_part = Xl @ mu_slopes if mu_slopes.size else 0.0
    mu0_b = float(np.mean(mu_obs - mu_part))
    logsig_part = Xs @ sigma_slopes if sigma_slopes.size else 0.0
    sigma0_b = float(np.mean(np.log(sigma_obs) - logsig_part))
    starts = _start_points(mu0_b, sigma0_b, pipe.xi)
    outcomes = _solve_gumbel_match(y, Xl, Xs, mu_slopes, sigma_slopes, starts)
    if not outcomes:
        return _result("PROP", spec, pipe.params, series, fallback=True,
                       n_roots=0, status="fallback", **pipe.diagnostics)
    best, best_chi = _select_root(outcomes, y, mu_part, logsig_part,
                                  mu_slopes.size, spec)
    mu0, sigma0, xi = best.root
    params = NsGevParams(np.concatenate([[mu0], mu_slopes]),
                         np.concatenate([[sigma0], sigma_slopes]), float(xi))
    return _result("PROP", spec, params, series, fallback=False,
                   n_roots=len(outcomes), chi=best_chi,
                   solver_residual=best.residual_norm, **pipe.diagnostics)


def fit_prop_covariate(series: AnnualSeries, spec: ModelSpec) -> FitResult:
    """Covariate generalization of the proposed method: robust location
    regression, log-linear scale regression of the absolute residuals,
    then the same frozen-slope standard-Gumbel L-moment match."""
    y = series.values
    Xl = spec.location_matrix(series)
    Xs = spec.logscale_matrix(series)
    X = _intercept_design(Xl)
    loc = mm_robust_fit(X, y) if Xl.shape[1] else ols_fit(X, y)
    eps_abs = np.abs(loc.residuals)
    sc = _scale_regression(eps_abs, Xs, robust=False)
    mu_slopes = loc.coef[1:]
    sigma_slopes = sc.coef[1:]
    # base start from a stationary fit of the location-detrended residuals
    st = stationary_lme_gev(loc.residuals)
    mu0_b = float(loc.coef[0] + st.mu)
    logsig_part = Xs @ sigma_slopes if sigma_slopes.size else 0.0
    sigma0_b = float(math.log(st.sigma) - np.mean(logsig_part))
    starts = _start_points(mu0_b, sigma0_b, st.xi)
    outcomes = _solve_gumbel_match(y, Xl, Xs, mu_slopes, sigma_slopes, starts)
    mu_part = Xl @ mu_slopes if mu_slopes.size else 0.0
    if not outcomes:
        params = NsGevParams(np.concatenate([[mu0_b], mu_slopes]),
                             np.concatenate([[sigma0_b], sigma_slopes]),
                             st.xi)
        return _result("PROP", spec, params, series, fallback=True,
                       n_roots=0, status="fallback")
    best, best_chi = _select_root(outcomes, y, mu_part, logsig_part,
                                  mu_slopes.size, spec)
    mu0, sigma0, xi = best.root
    params = NsGevParams(np.concatenate([[mu0], mu_slopes]),
                         np.concatenate([[sigma0], sigma_slopes]), float(xi))
    return _result("PROP", spec, params, series, fallback=False,
                   n_roots=len(outcomes), chi=best_chi,
                   solver_residual=best.residual_norm)


#: method tag -> fitting callable (used by bootstrap refits and the CLI)
METHODS = {
    "mle": fit_mle,
    "wls": fit_wls,
    "gn16": fit_gn16,
    "prop": fit_prop,
    "lme-sta-gev": lambda s, spec=None: fit_stationary(s, "gev"),
    "lme-sta-gum": lambda s, spec=None: fit_stationary(s, "gumbel"),
}


def fit(series: AnnualSeries, method: str, spec: ModelSpec) -> FitResult:
    """Dispatch a fit by method tag."""
    key = method.lower()
    if key not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if key.startswith("lme-sta"):
        return METHODS[key](series)
    if key == "prop" and spec.family == "covariate":
        return fit_prop_covariate(series, spec)
    return METHODS[key](series, spec)
