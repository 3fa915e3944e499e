"""Kernel backend selection.

The compiled kernel is preferred when the extension module built from
``_rref_c.pyx`` is importable; setting the environment variable
``FIMLAB_PURE=1`` forces the pure-Python kernel (used by the parity tests
and the benchmark).
"""

import os

from . import _rref_py

if os.environ.get("FIMLAB_PURE") == "1":
    rref_int = _rref_py.rref_int
    BACKEND = "pure"
else:
    try:
        from . import _rref_c

        rref_int = _rref_c.rref_int
        BACKEND = "compiled"
    except ImportError:
        rref_int = _rref_py.rref_int
        BACKEND = "pure"
