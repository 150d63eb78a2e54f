"""Build script: compiles the optional Cython kernel.

The extension is an accelerator only; if it cannot be built the package
falls back to the pure-NumPy kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/mtx/_kernel.pyx"],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs = [numpy.get_include()]
        ext.optional = True
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
