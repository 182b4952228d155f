import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    # -ffp-contract=off keeps the compiled kernels bit-identical to the
    # pure-Python fallback: no fused multiply-adds may be introduced.
    compile_args = ["-O2", "-ffp-contract=off"] if os.name == "posix" else []
    ext_modules = cythonize(
        [
            Extension(
                "fcmseg._kernels",
                ["src/fcmseg/_kernels.pyx"],
                extra_compile_args=compile_args,
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
