import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "tsgeval._kernels._dtw_cy",
        ["src/tsgeval/_kernels/_dtw_cy.pyx"],
        include_dirs=[np.get_include()],
        # no fast-math / fp contraction: results must match the pure-Python path bit for bit
        extra_compile_args=["-O3", "-fopenmp", "-ffp-contract=off"],
        extra_link_args=["-fopenmp"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
