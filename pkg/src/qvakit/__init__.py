"""Exact checks of R-matrix, braiding-map and module-map identities over Q[[h]]/(h^H)."""

from .algebra import AlgebraSpec, make_spec, parse_spec
from .kernels import BACKEND
from .report import CheckReport
from .tensor import TensorOp

__all__ = ["AlgebraSpec", "BACKEND", "CheckReport", "TensorOp", "make_spec", "parse_spec"]
__version__ = "0.1.0"
