from setuptools import Extension, setup

# The compiled circuit-search kernel is optional: the package falls back to
# the pure-Python engine when the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "netcycle._fastcircuits",
                ["src/netcycle/_fastcircuits.pyx"],
                language="c++",
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
