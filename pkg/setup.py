"""Build script for the optional compiled kernel.

The extension links against numpy's bundled RNG runtime (libnpyrandom) so
that the compiled stepping loop can pull doubles straight out of the replica
bit generator.  The extension is marked optional: if it cannot be built the
package installs anyway and falls back to the pure-Python engine.
"""

from pathlib import Path

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # building from an sdist without Cython is unsupported
    cythonize = None

_np_random_lib = Path(np.random.__file__).parent / "lib"

ext = Extension(
    "axiswalk._kernel",
    sources=["src/axiswalk/_kernel.pyx"],
    include_dirs=[np.get_include()],
    library_dirs=[str(_np_random_lib)],
    libraries=["npyrandom"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    extra_compile_args=["-O3"],
    optional=True,
)

setup(ext_modules=cythonize([ext], language_level=3) if cythonize else [])
