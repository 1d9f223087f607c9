"""Builds the optional compiled kernel extension.

The package works without it (a numpy fallback is selected at import); build
the fast path with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "modmi._kernels._cykernels",
                ["src/modmi/_kernels/_cykernels.pyx"],
                # -ffp-contract=off: no FMA contraction, so the compiled
                # kernels round exactly like the numpy fallback.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
