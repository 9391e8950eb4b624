import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "setmoduli._qpcore",
                sources=["src/setmoduli/_qpcore.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

# Building without Cython is supported: the package falls back to the
# pure-Python kernel at import time.
setup(ext_modules=ext_modules)
