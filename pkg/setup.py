import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    cythonize = None

extensions = []
if cythonize is not None and not os.environ.get("SYMEST_NO_EXT"):
    extensions = cythonize(
        [Extension("symest._ckernel", ["src/symest/_ckernel.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
