"""Build script for the optional compiled terrain kernel.

The package is pure Python except for one Cython extension that accelerates
fractal surface synthesis.  The extension is strictly optional: if Cython or
a C compiler is unavailable the build falls back to the numpy implementation
selected at import time, and every public interface behaves identically.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build extensions, degrading to pure Python on any toolchain failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken headers, ...
            warnings.warn(f"compiled terrain kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled terrain kernel skipped: {exc}")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not installed, building without compiled kernel")
        return []
    # fp-contract off: FMA contraction would change round-off and break the
    # bit-identical guarantee against the numpy kernel.  no-builtin sin/cos:
    # gcc otherwise fuses adjacent cos/sin calls into glibc sincos, which
    # rounds differently from the separate calls numpy makes (about 1 ulp
    # on 0.1% of arguments).
    ext = Extension(
        "climbsim.terrain._ridge_c",
        ["src/climbsim/terrain/_ridge_c.pyx"],
        extra_compile_args=[
            "-O3",
            "-ffp-contract=off",
            "-fno-builtin-sin",
            "-fno-builtin-cos",
        ],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
