"""Build script: compiles the optional C kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so failure to cythonize is not fatal for source checkouts.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hypersplit._kernels",
                ["src/hypersplit/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
