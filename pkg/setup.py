"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so any build failure here downgrades to a pure-Python install.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("NSGEVLM_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/nsgevlm/_kernels.pyx",
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
    except Exception as exc:  # pragma: no cover - build-env dependent
        print(f"nsgevlm: skipping Cython extension ({exc}); "
              "pure-Python kernels will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
