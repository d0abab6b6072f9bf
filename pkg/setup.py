from setuptools import Extension, setup
from Cython.Build import cythonize

# The compiled kernels are an optional speedup; the package falls back to the
# NumPy implementations in blockembed.kernels if the build is unavailable.
ext = Extension(
    "blockembed._speedups",
    sources=["src/blockembed/_speedups.pyx"],
    extra_compile_args=["-O3"],
    optional=True,
)

setup(
    ext_modules=cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
)
