"""Build script: compiles the optional Cython kernel for the d-matrix recursion.

The extension is a pure speedup; if Cython or a C compiler is unavailable the
package installs anyway and falls back to the numpy kernel at import time.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "sepwitness._dkernel",
                ["src/sepwitness/_dkernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001 - any build-chain problem means "no extension"
    sys.stderr.write(f"sepwitness: skipping Cython kernel ({exc}); using numpy fallback\n")

setup(ext_modules=ext_modules)
