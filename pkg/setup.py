"""Build script.  The compiled kernel is optional: if Cython or a C compiler
is unavailable the package installs pure-Python and selects the numpy
fallback at import time."""

from setuptools import setup, Extension

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        [
            Extension(
                "e8lab._kernels._speedups",
                ["src/e8lab/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    print("cython kernel skipped:", exc)

setup(ext_modules=ext_modules)
