"""Build script: compiles the numeric core extension when Cython is available.

The package works without the extension (a pure-Python kernel module is
selected at import time), so the build is marked optional and never fails
the install.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        ["src/mecrelay/_core/_speedups.pyx"],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in extensions:
        ext.optional = True
        ext.extra_compile_args = ["-O2"]
except ImportError:
    extensions = []


class OptionalBuildExt(build_ext):
    """Never fail the install over a missing compiler."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: extension build skipped ({exc}); using pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: {ext.name} build failed ({exc}); using pure-Python kernels")


setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
