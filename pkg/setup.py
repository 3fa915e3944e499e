"""Build script.  The compiled elimination kernel is optional: if Cython or a
C compiler is missing the package installs anyway and falls back to the pure
Python kernel at import time."""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/fimlab/_rref_c.pyx"],
        language_level="3",
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
