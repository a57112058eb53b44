"""Build script for the optional compiled kernel core.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes the per-mode hot loops faster.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "decaylab.kernels._fastcore",
        ["src/decaylab/kernels/_fastcore.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
