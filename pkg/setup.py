"""Build the optional Cython kernels; the package falls back to numpy if they are missing."""
import os

from setuptools import Extension, setup


def get_extensions():
    if os.environ.get("WGDOUBLET_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "wgdoublet.kernels._ckernels",
        ["src/wgdoublet/kernels/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=get_extensions())
