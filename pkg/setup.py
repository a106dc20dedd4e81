"""Build script: compiles the accelerated kernels when a toolchain is present.

The package must stay importable without the extension, so a failed
Cython or C build downgrades to the pure-Python kernels instead of
aborting the install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "busrank.kernels._native",
                ["src/busrank/kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # no Cython / no compiler: pure kernels still work
    print(f"busrank: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
