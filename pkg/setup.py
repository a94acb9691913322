"""Build hook for the optional compiled kernels.

The package works without them: ``geodesic_coder.kernels`` falls back to numpy
when ``_kernels`` cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("GEODESIC_CODER_PURE", "") not in ("1", "true", "yes"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "geodesic_coder._kernels",
                    ["src/geodesic_coder/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
