"""Kernel backend selection.

Imports the compiled Cython kernels when available and falls back to the
NumPy reference implementations otherwise. ``BACKEND`` records which one
is active; ``benchmarks/bench_kernels.py`` compares the two.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("NSGEVLM_NO_EXT"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build environment
        _impl = _kernels_py
        BACKEND = "python"

lmom4_sorted = _impl.lmom4_sorted
gumbel_residual = _impl.gumbel_residual
