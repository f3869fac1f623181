import numpy as np
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "stokes_spectra._kernels._core",
                ["src/stokes_spectra/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python fallback is selected at import time if the extension
    # is missing, so a Cython-less build still produces a working package.
    ext_modules = []

setup(ext_modules=ext_modules)
