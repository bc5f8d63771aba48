"""Kernel selection: the compiled extension when importable, else pure Python.

Set QVAKIT_PURE=1 to force the pure-Python path.
"""

import os

BACKEND = "python"

if os.environ.get("QVAKIT_PURE", "") not in ("", "0"):
    from ._kernels import spmm
else:
    try:
        from ._ckernels import spmm

        BACKEND = "cython"
    except ImportError:
        from ._kernels import spmm

__all__ = ["spmm", "BACKEND"]
