# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cython implementations of the hot kernels (see _kernels_py for the
reference NumPy versions)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log
from libc.stdlib cimport qsort

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286
cdef double LOG2 = 0.6931471805599453
cdef double GUMBEL_TAU3 = 0.16992500144231237


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double da = (<const double*> a)[0]
    cdef double db = (<const double*> b)[0]
    if da < db:
        return -1
    elif da > db:
        return 1
    return 0


cdef void _lmom4_sorted_c(double* xs, Py_ssize_t n, double* out) noexcept nogil:
    cdef double b0 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0
    cdef Py_ssize_t i
    cdef double k
    for i in range(n):
        k = <double> i  # i-1 with one-based indexing
        b0 += xs[i]
        b1 += k * xs[i]
        b2 += k * (k - 1.0) * xs[i]
        b3 += k * (k - 1.0) * (k - 2.0) * xs[i]
    cdef double dn = <double> n
    b0 /= dn
    b1 /= dn * (dn - 1.0)
    b2 /= dn * (dn - 1.0) * (dn - 2.0)
    b3 /= dn * (dn - 1.0) * (dn - 2.0) * (dn - 3.0)
    out[0] = b0
    out[1] = 2.0 * b1 - b0
    out[2] = 6.0 * b2 - 6.0 * b1 + b0
    out[3] = 20.0 * b3 - 30.0 * b2 + 12.0 * b1 - b0


def lmom4_sorted(double[::1] xs):
    """First four sample L-moments of an already-sorted sample."""
    cdef double out[4]
    _lmom4_sorted_c(&xs[0], xs.shape[0], out)
    return out[0], out[1], out[2], out[3]


def gumbel_residual(double[::1] z, double[::1] mu, double[::1] sigma,
                    double xi, double xi_eps=1e-7):
    """L-moment residual of the Gumbel-standardized series against the
    standard-Gumbel targets; None on a support violation."""
    cdef Py_ssize_t n = z.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] buf = np.empty(n, dtype=np.float64)
    cdef double[::1] zt = buf
    cdef Py_ssize_t i
    cdef double u, w
    cdef bint gumbel = fabs(xi) < xi_eps
    for i in range(n):
        u = (z[i] - mu[i]) / sigma[i]
        if gumbel:
            zt[i] = u
        else:
            w = 1.0 - xi * u
            if w <= 0.0:
                return None
            zt[i] = -log(w) / xi
    qsort(&zt[0], n, sizeof(double), _cmp_double)
    cdef double lm[4]
    _lmom4_sorted_c(&zt[0], n, lm)
    if lm[1] <= 0.0:
        return None
    return (lm[0] - EULER_GAMMA, lm[1] - LOG2, lm[2] / lm[1] - GUMBEL_TAU3)
