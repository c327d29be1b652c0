"""Benchmark the compiled kernels against the NumPy reference
implementations, plus an end-to-end fit timing.

Run:  python3 benchmarks/bench_kernels.py
"""
import time

import numpy as np

from nsgevlm import _backend, _kernels_py
from nsgevlm.fitters import fit_prop
from nsgevlm.models import ModelSpec
from nsgevlm.series import AnnualSeries


def _time(fn, *args, repeat=5, inner=200):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_lmom4():
    print(f"active backend: {_backend.BACKEND}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(0)))
    for n in (50, 500, 5000):
        xs = np.sort(rng.gumbel(size=n))
        t_py = _time(_kernels_py.lmom4_sorted, xs)
        t_c = _time(_backend.lmom4_sorted, xs)
        label = "compiled" if _backend.BACKEND == "cython" else "fallback"
        print(f"lmom4_sorted n={n:5d}: numpy {t_py * 1e6:8.2f} us | "
              f"{label} {t_c * 1e6:8.2f} us | speedup {t_py / t_c:5.2f}x")


def bench_gumbel_residual():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(1)))
    for n in (50, 500, 5000):
        z = np.ascontiguousarray(rng.gumbel(size=n) * 2 + 1)
        mu = np.full(n, 0.5)
        sigma = np.full(n, 2.0)
        t_py = _time(_kernels_py.gumbel_residual, z, mu, sigma, -0.1)
        t_c = _time(_backend.gumbel_residual, z, mu, sigma, -0.1)
        print(f"gumbel_residual n={n:5d}: numpy {t_py * 1e6:8.2f} us | "
              f"active {t_c * 1e6:8.2f} us | speedup {t_py / t_c:5.2f}x")


def bench_fit():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(2)))
    n = 50
    t = np.arange(1, n + 1, dtype=float)
    mu = -0.1 * t
    sigma = np.exp(1.0 + 0.02 * t)
    xi = -0.1
    y = -np.log(np.clip(rng.random(n), 1e-16, 1 - 1e-16))
    z = mu + (sigma / xi) * (1.0 - y**xi)
    series = AnnualSeries(np.arange(2000, 2000 + n), z)
    spec = ModelSpec.gev11()
    t0 = time.perf_counter()
    reps = 20
    for _ in range(reps):
        fit_prop(series, spec)
    per = (time.perf_counter() - t0) / reps
    print(f"fit_prop (n=50, gev11, {_backend.BACKEND} backend): "
          f"{per * 1e3:.1f} ms per fit")


if __name__ == "__main__":
    bench_lmom4()
    bench_gumbel_residual()
    bench_fit()
