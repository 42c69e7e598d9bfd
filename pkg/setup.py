"""Build script for the compiled event-loop kernels.

The extension is optional: if no C compiler (or Cython) is available the
package installs anyway and falls back to the pure-Python kernels in
``lvsweep._kernels._pure`` at import time.  Do not pass -ffast-math: the
compiled and pure kernels must produce bit-identical streams.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise warn and continue."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "WARNING: building lvsweep._kernels._core failed (%s); "
            "falling back to the pure-Python kernels.\n" % exc
        )


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "lvsweep._kernels._core",
                ["src/lvsweep/_kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
