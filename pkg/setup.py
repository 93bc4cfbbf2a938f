from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "weaklight._kernels._core",
                ["src/weaklight/_kernels/_core.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    # No Cython available: install the pure-numpy fallback only.
    extensions = []

setup(ext_modules=extensions)
