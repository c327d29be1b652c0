"""Trend-fitting primitives: OLS, WLS, MM robust regression with the
Tukey biweight, and Sen's nonparametric slope estimator.

All fitters take a design matrix whose first column is the intercept and
return a RegressionFit with residuals y - X @ coef.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Tukey biweight tuning constant (95% Gaussian efficiency)
TUKEY_C = 4.685


class SingularDesignError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionFit:
    coef: np.ndarray
    residuals: np.ndarray
    method: str
    scale_tau: float | None = None
    converged: bool = True


def design_matrix(*columns) -> np.ndarray:
    """Stack regressor columns after a leading intercept column."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    n = cols[0].size if cols else 0
    if not cols:
        raise ValueError("at least one regressor column or length required")
    return np.column_stack([np.ones(n)] + cols)


def _check_design(X: np.ndarray, y: np.ndarray):
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValueError("design/response shape mismatch")
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularDesignError("design matrix is rank deficient")


def ols_fit(X: np.ndarray, y) -> RegressionFit:
    """Ordinary least squares via QR (numpy lstsq)."""
    y = np.asarray(y, dtype=float)
    _check_design(X, y)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return RegressionFit(coef=coef, residuals=y - X @ coef, method="ols")


def wls_fit(X: np.ndarray, y, w) -> RegressionFit:
    """Weighted least squares minimizing sum w_i (y_i - x_i'beta)^2."""
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    _check_design(X, y)
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    return RegressionFit(coef=coef, residuals=y - X @ coef, method="wls")


def _biweight_weights(u: np.ndarray) -> np.ndarray:
    # w(u) = psi(u)/u = (1 - (u/c)^2)^2 inside the support, 0 outside;
    # the u -> 0 limit is psi'(0) = 1
    w = np.zeros_like(u)
    inside = np.abs(u) < TUKEY_C
    w[inside] = (1.0 - (u[inside] / TUKEY_C) ** 2) ** 2
    return w


def mm_robust_fit(X: np.ndarray, y, max_iter: int = 200,
                  tol: float = 1e-10) -> RegressionFit:
    """MM-type robust regression: estimating equations
    sum psi(r_i/tau) x_ij = 0 with psi the Tukey biweight.

    The robust scale tau = 1.4826*(1 + 5/(n-p))*med(|r_i|) is computed once
    from the OLS residuals and held fixed; the equations are solved by
    iteratively reweighted least squares started at OLS.
    """
    y = np.asarray(y, dtype=float)
    _check_design(X, y)
    n, p1 = X.shape
    p = p1 - 1
    ols = ols_fit(X, y)
    tau = 1.4826 * (1.0 + 5.0 / (n - p)) * np.median(np.abs(ols.residuals))
    scale0 = max(1.0, float(np.median(np.abs(y))))
    if tau <= 1e-12 * scale0:
        # (numerically) exact fit: nothing to down-weight
        return RegressionFit(coef=ols.coef, residuals=ols.residuals,
                             method="mm", scale_tau=0.0)
    coef = ols.coef.copy()
    converged = False
    for _ in range(max_iter):
        r = y - X @ coef
        w = _biweight_weights(r / tau)
        if not np.any(w > 0):
            break
        sw = np.sqrt(w)
        new, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
        if np.max(np.abs(new - coef)) < tol:
            coef = new
            converged = True
            break
        coef = new
    return RegressionFit(coef=coef, residuals=y - X @ coef, method="mm",
                         scale_tau=float(tau), converged=converged)


def sen_fit(t, y) -> RegressionFit:
    """Sen's nonparametric line: slope = median of pairwise slopes,
    intercept = median(y - slope*t)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size < 2:
        raise ValueError("need at least 2 points")
    i, j = np.triu_indices(t.size, k=1)
    dt = t[j] - t[i]
    keep = dt != 0
    if not np.any(keep):
        raise ValueError("all time values are equal; slope undefined")
    slope = float(np.median((y[j] - y[i])[keep] / dt[keep]))
    intercept = float(np.median(y - slope * t))
    coef = np.array([intercept, slope])
    return RegressionFit(coef=coef, residuals=y - intercept - slope * t,
                         method="sen")
