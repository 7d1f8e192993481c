"""Build script for the optional compiled simulation kernel.

The package is fully functional without the extension: agenet._backend
falls back to the numpy kernel when agenet._agekernel is missing, so a
failed compile downgrades the install instead of breaking it.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, broken toolchain, ...
            warnings.warn(f"compiled kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel {ext.name} skipped: {exc}")


extension = Extension("agenet._agekernel", ["src/agenet/_agekernel.pyx"])

try:
    from Cython.Build import cythonize

    ext_modules = cythonize([extension], language_level=3)
except ImportError:
    warnings.warn("Cython unavailable; installing with the numpy kernel only")
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
