"""Build script: compiles the optional Cython evaluation core.

The package works without the extension (a pure-NumPy core is selected at
import time), so a failed compilation downgrades to a warning rather than
aborting the install.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "vofrac._fastcore",
                sources=["src/vofrac/_fastcore.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(
        f"vofrac: skipping compiled core ({exc!r}); the pure-Python core will be used\n"
    )

setup(ext_modules=ext_modules)
