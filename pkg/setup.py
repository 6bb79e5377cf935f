"""Build script for the optional compiled search kernel.

The package works without the extension (a pure-Python twin is selected at
import time), so the extension is marked optional: a failed compile degrades
to the fallback instead of breaking the install.
"""

import os

from setuptools import Extension, setup

PYX = os.path.join("src", "beamplan", "_kernel_cy.pyx")

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None and os.path.exists(PYX):
    extensions = cythonize(
        [Extension("beamplan._kernel_cy", [PYX], extra_compile_args=["-O3"])],
        language_level=3,
    )
    for ext in extensions:
        ext.optional = True
else:
    extensions = []

setup(ext_modules=extensions)
