"""Process-wide run settings shared by the check modules."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 7
DEFAULT_F_ORDER = 12

_budget = DEFAULT_BUDGET
_f_order = DEFAULT_F_ORDER


def budget() -> int:
    """Largest operator arity a check may build before it reports itself skipped."""
    return _budget


def set_budget(n: int) -> None:
    global _budget
    if n < 1:
        raise ValueError("budget must be at least 1")
    _budget = n


def f_order() -> int:
    """Default truncation K of f in 1/u; raised automatically when an h-order needs more."""
    return _f_order


def set_f_order(k: int) -> None:
    global _f_order
    if k < 1:
        raise ValueError("f order must be at least 1")
    _f_order = k


def worker_count() -> int:
    """QVAKIT_WORKERS if set, else the CPUs this process may use."""
    env = os.environ.get("QVAKIT_WORKERS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("QVAKIT_WORKERS must be positive")
        return n
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1
