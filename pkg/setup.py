"""Optionally compile the simulation core with Cython.

The engine imports `rulegen._simcore_c` when present and falls back to the
pure-Python `rulegen._simcore` otherwise, so a missing compiler or Cython
install only costs speed, never correctness.
"""

import os
import shutil

from setuptools import setup


def _extensions():
    if os.environ.get("RULEGEN_NO_EXT"):
        return []
    if not (shutil.which("cc") or shutil.which("gcc") or shutil.which("clang")):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    import pathlib

    from setuptools import Extension

    here = pathlib.Path(__file__).parent
    src = here / "src" / "rulegen" / "_simcore.py"
    shadow = src.with_name("_simcore_c.py")
    # compile a copy under the compiled module's name so the pure-Python
    # original stays importable as rulegen._simcore
    shadow.write_text(src.read_text())
    try:
        return cythonize(
            [Extension("rulegen._simcore_c",
                       [str(shadow.relative_to(here))])],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
    finally:
        # keep only the generated C; the .py copy would shadow the built
        # extension on the import path
        shadow.unlink(missing_ok=True)


setup(ext_modules=_extensions())
