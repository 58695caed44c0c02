import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "kondochain._matvec_cy",
                ["src/kondochain/_matvec_cy.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python kernels are selected at import time when the extension
    # is missing; the package stays fully functional.
    ext_modules = []

setup(ext_modules=ext_modules)
