import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernel is optional: attrasr.kernels falls back to the pure
# Python implementation when the extension is missing.  No -ffast-math here;
# the two backends must agree bit for bit.
extensions = [
    Extension(
        "attrasr._kernel",
        ["src/attrasr/_kernel.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
]

if cythonize is not None:
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
else:
    ext_modules = []

setup(ext_modules=ext_modules)
