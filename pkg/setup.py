"""Build script: compiles the optional kernel extension.

The package works without the extension (pure-numpy fallback); set
CAPSPEC_PURE_PYTHON=1 to skip compilation explicitly.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("CAPSPEC_PURE_PYTHON") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "capspec._kernels._cycore",
                    ["src/capspec/_kernels/_cycore.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
