import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SPECTRA_CDMA_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "spectra_cdma._corrcore",
                    ["src/spectra_cdma/_corrcore.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython/compiler: install pure-Python; the simulator falls back
        # to the numpy kernel selected at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
