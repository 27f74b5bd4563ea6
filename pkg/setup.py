from setuptools import setup

# The compiled kernel is optional: if Cython (or a C compiler) is missing the
# package installs pure-Python only and symcanon._core falls back at import.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/symcanon/_core/_corecy.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
