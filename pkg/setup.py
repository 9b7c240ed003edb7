"""Build script: compiles the optional C speedup kernel when Cython is available.

The package works without the extension (a pure-Python fallback is selected
at import time), so any build failure here is downgraded to a warning.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/geodd/_speedups.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"geodd: skipping compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
