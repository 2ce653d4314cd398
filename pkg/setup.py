"""Build script for the optional compiled simplex kernel.

The extension is optional: if Cython or a C compiler is missing the package
installs without it and ``infconvkit.lp`` falls back to the numpy kernel.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("INFCONVKIT_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "infconvkit._simplex",
                    ["src/infconvkit/_simplex.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
