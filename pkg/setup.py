"""Build script: compiles the optional Cython fast path for the SVM inner loops.

The package works without the extension (a pure-Python implementation of the
same routines is selected at import time), so any build failure here downgrades
to a warning instead of aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Swallow compiler failures; the package falls back to pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            warnings.warn(f"fast-path extension build failed ({exc}); "
                          "using the pure-Python SVM routines")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - depends on toolchain
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "using the pure-Python SVM routines")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - depends on toolchain
        return []
    ext = Extension(
        "fairpca._inner._svm",
        sources=["src/fairpca/_inner/_svm.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
