import os

from setuptools import setup

ext_modules = []
try:
    import gmpy2
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "qvakit._ckernels",
                ["src/qvakit/_ckernels.pyx"],
                include_dirs=[os.path.dirname(gmpy2.__file__)],
                libraries=["gmp"],
            )
        ],
        include_path=[os.path.dirname(gmpy2.__file__)],
        language_level=3,
        quiet=True,
    )
except ImportError:
    # no Cython available: the package falls back to the pure kernels
    pass

setup(ext_modules=ext_modules)
