"""Nonlinear equation and optimization kernels: damped Newton with
multi-start for small square systems, a bracketing scalar root-finder,
and a derivative-free simplex minimizer."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .distributions import SupportViolationError


class BracketError(ValueError):
    pass


class DomainViolation(ValueError):
    """Raised by residual functions when a trial point is infeasible."""


@dataclass(frozen=True)
class SolveOutcome:
    root: np.ndarray
    residual_norm: float
    status: str  # converged | max-iter | diverged | domain-violation
    start_index: int = 0
    iterations: int = 0

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _try_eval(f, x):
    try:
        return np.asarray(f(x), dtype=float)
    except (DomainViolation, SupportViolationError):
        return None


def newton_system(f, x0, tol: float = 1e-9, max_iter: int = 100,
                  start_index: int = 0) -> SolveOutcome:
    """Damped Newton iteration for a small square system.

    Jacobian by forward differences (step 1e-6*(1+|x|)); step halving
    (up to 20 times) on the sup-norm of the residual, which also backs
    away from domain violations. Never reports convergence with
    ||f||_inf >= tol.
    """
    x = np.asarray(x0, dtype=float).copy()
    fx = _try_eval(f, x)
    if fx is None:
        return SolveOutcome(x, np.inf, "domain-violation", start_index, 0)
    perturbed = False
    for it in range(1, max_iter + 1):
        norm = np.max(np.abs(fx))
        if norm < tol:
            return SolveOutcome(x, float(norm), "converged", start_index, it - 1)
        m = x.size
        J = np.empty((m, m))
        ok = True
        for j in range(m):
            h = 1e-6 * (1.0 + abs(x[j]))
            xp = x.copy()
            xp[j] += h
            fp = _try_eval(f, xp)
            if fp is None:
                xp[j] = x[j] - h  # one-sided fallback away from the boundary
                fp = _try_eval(f, xp)
                if fp is None:
                    ok = False
                    break
                J[:, j] = (fx - fp) / h
            else:
                J[:, j] = (fp - fx) / h
        if not ok:
            return SolveOutcome(x, float(norm), "domain-violation",
                                start_index, it)
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            if perturbed:
                return SolveOutcome(x, float(norm), "diverged", start_index, it)
            J = J + 1e-8 * np.eye(m)
            perturbed = True
            try:
                step = np.linalg.solve(J, -fx)
            except np.linalg.LinAlgError:
                return SolveOutcome(x, float(norm), "diverged", start_index, it)
        if not np.all(np.isfinite(step)):
            return SolveOutcome(x, float(norm), "diverged", start_index, it)
        # halving line search on ||f||_inf; also shrinks through domain walls
        lam = 1.0
        accepted = False
        for _ in range(20):
            xn = x + lam * step
            fn = _try_eval(f, xn)
            if fn is not None and np.all(np.isfinite(fn)):
                if np.max(np.abs(fn)) < norm or lam < 1.0 / (1 << 19):
                    x, fx = xn, fn
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            return SolveOutcome(x, float(norm), "diverged", start_index, it)
    norm = float(np.max(np.abs(fx)))
    status = "converged" if norm < tol else "max-iter"
    return SolveOutcome(x, norm, status, start_index, max_iter)


def multistart_solve(f, starts, tol: float = 1e-9,
                     max_iter: int = 100) -> list[SolveOutcome]:
    """Run newton_system from each start; return the converged outcomes,
    deduplicated at 1e-6 parameter distance. Empty list = global failure."""
    if len(starts) < 1:
        raise ValueError("need at least one start point")
    roots: list[SolveOutcome] = []
    for k, x0 in enumerate(starts):
        out = newton_system(f, x0, tol=tol, max_iter=max_iter, start_index=k)
        if not out.converged:
            continue
        if any(np.max(np.abs(out.root - r.root)) < 1e-6 for r in roots):
            continue
        roots.append(out)
    return roots


def brent_root(g, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Bracketing scalar root via Brent's method."""
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return float(lo)
    if ghi == 0.0:
        return float(hi)
    if glo * ghi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]")
    return float(optimize.brentq(g, lo, hi, xtol=tol))


def nelder_mead(h, x0, scale=None, tol: float = 1e-10,
                max_iter: int = 20000) -> tuple[np.ndarray, bool]:
    """Nelder-Mead simplex minimization; infeasible points should make h
    return +inf. Returns (best point, converged flag)."""
    x0 = np.asarray(x0, dtype=float)
    options = {"maxiter": max_iter, "maxfev": max_iter,
               "xatol": tol, "fatol": tol}
    if scale is not None:
        scale = np.asarray(scale, dtype=float)
        simplex = np.vstack([x0] + [x0 + scale * np.eye(x0.size)[j]
                                    for j in range(x0.size)])
        options["initial_simplex"] = simplex
    res = optimize.minimize(h, x0, method="Nelder-Mead", options=options)
    return np.asarray(res.x), bool(res.success)
