"""Build script for the optional compiled sampling kernel.

The package is fully functional without the extension: ivdeck.sampling
falls back to a vectorized NumPy implementation that produces identical
output. Building the kernel just makes large simulations faster, so a
missing compiler or a missing Cython install downgrades the build to
pure Python instead of failing it.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that warns and continues when compilation fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        import warnings

        warnings.warn(
            "could not build the compiled sampling kernel (%s); "
            "falling back to the NumPy implementation" % (exc,)
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "ivdeck.sampling._kernel",
                ["src/ivdeck/sampling/_kernel.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
