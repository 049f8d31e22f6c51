from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "sterr._ddkernel",
        ["src/sterr/_ddkernel.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
