"""Pure-NumPy implementations of the hot kernels.

These are the reference implementations; ``_kernels.pyx`` mirrors them in
Cython for speed. Both are exercised by the test suite and must agree to
floating-point roundoff.
"""
from __future__ import annotations

import numpy as np

#: Euler-Mascheroni constant (first L-moment of the standard Gumbel).
EULER_GAMMA = 0.57721566490153286
#: log(2) (second L-moment of the standard Gumbel).
LOG2 = 0.6931471805599453
#: L-skewness of the standard Gumbel, 2*log(3)/log(2) - 3.
GUMBEL_TAU3 = 0.16992500144231237


def lmom4_sorted(xs: np.ndarray) -> tuple[float, float, float, float]:
    """First four sample L-moments of an already-sorted sample.

    Uses the unbiased probability-weighted-moment estimators
    b_r = n^-1 sum_i [(i-1)...(i-r) / ((n-1)...(n-r))] x_(i).
    """
    n = xs.shape[0]
    i = np.arange(1.0, n + 1.0)
    b0 = xs.mean()
    b1 = np.dot(i - 1.0, xs) / (n * (n - 1.0))
    b2 = np.dot((i - 1.0) * (i - 2.0), xs) / (n * (n - 1.0) * (n - 2.0))
    b3 = np.dot((i - 1.0) * (i - 2.0) * (i - 3.0), xs) / (
        n * (n - 1.0) * (n - 2.0) * (n - 3.0)
    )
    l1 = b0
    l2 = 2.0 * b1 - b0
    l3 = 6.0 * b2 - 6.0 * b1 + b0
    l4 = 20.0 * b3 - 30.0 * b2 + 12.0 * b1 - b0
    return float(l1), float(l2), float(l3), float(l4)


def gumbel_residual(
    z: np.ndarray,
    mu: np.ndarray,
    sigma: np.ndarray,
    xi: float,
    xi_eps: float = 1e-7,
) -> tuple[float, float, float] | None:
    """L-moment residual of the Gumbel-standardized series against the
    standard-Gumbel targets (gamma, log 2, tau3).

    Returns None when any observation falls outside the GEV support for
    the candidate parameters (the solver treats that as a domain
    violation).
    """
    u = (z - mu) / sigma
    if abs(xi) < xi_eps:
        zt = u
    else:
        w = 1.0 - xi * u
        if np.any(w <= 0.0):
            return None
        zt = -np.log(w) / xi
    zs = np.sort(zt)
    l1, l2, l3, _ = lmom4_sorted(zs)
    if l2 <= 0.0:
        return None
    return (l1 - EULER_GAMMA, l2 - LOG2, l3 / l2 - GUMBEL_TAU3)
