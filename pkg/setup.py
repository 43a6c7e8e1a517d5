"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure numpy fallback is selected at
import time), so a failed compile only costs speed, not functionality.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "gastrans.kernels._core",
                ["src/gastrans/kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"gastrans: skipping Cython extension build ({exc})")

setup(ext_modules=ext_modules)
