"""Build script. The compiled kernel is optional: without Cython (or on a
failed compile) the package falls back to the pure-Python twin at import."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/qpathdist/_pairmin.pyx"],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
