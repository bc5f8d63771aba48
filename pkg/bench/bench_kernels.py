"""Compiled vs pure-Python sparse series product.

    python3 bench/bench_kernels.py            # kernel and end-to-end timings
    python3 bench/bench_kernels.py --quick    # fewer repeats, no end-to-end runs

Kernel timings call both spmm implementations on the same operands; the
end-to-end timings run one check in a subprocess per backend (QVAKIT_PURE
selects the backend at import time, so it cannot be switched in-process).
"""

import argparse
import os
import subprocess
import sys
import timeit

from qvakit import _kernels
from qvakit.algebra import make_spec
from qvakit.rmatrix import arg, r_at
from qvakit.scalar import Rat
from qvakit.tensor import compose

try:
    from qvakit import _ckernels
except ImportError:
    _ckernels = None

E2E = {
    "qybe sigma o_3 H=4": "check_map_qybe(make_spec('o', 3), 'sigma', H=4, samples=1)",
    "fixed point rho o_3 (2,2) H=4": "check_fixed_point(make_spec('o', 3), 'rho', 2, 2, H=4, samples=1)",
}


def operands(family, N, arity, H):
    """Two products of R-factors on `arity` factors: the shapes the checks actually multiply."""
    spec = make_spec(family, N)
    pairs = [(i, j) for i in range(arity) for j in range(i + 1, arity)]
    a = b = None
    for k, (i, j) in enumerate(pairs):
        R = r_at(spec, "normalized", arg(Rat(3 + k, 7)), H, arity, i, j)
        S = r_at(spec, "normalized", arg(Rat(-5 - k, 11)), H, arity, i, j)
        a = R if a is None else compose(a, R)
        b = S if b is None else compose(b, S)
    return a, b


def bench_kernel(label, a, b, repeat):
    row = [label, f"D={a.D}", f"nnz={len(a.entries)}/{len(b.entries)}"]
    t_py = min(timeit.repeat(lambda: _kernels.spmm(a.entries, b.entries, a.D, a.H), number=1, repeat=repeat))
    row.append(f"pure {t_py * 1e3:9.2f} ms")
    if _ckernels is not None:
        ref = _kernels.spmm(a.entries, b.entries, a.D, a.H)
        assert _ckernels.spmm(a.entries, b.entries, a.D, a.H) == ref
        t_c = min(timeit.repeat(lambda: _ckernels.spmm(a.entries, b.entries, a.D, a.H), number=1, repeat=repeat))
        row += [f"cython {t_c * 1e3:9.2f} ms", f"x{t_py / t_c:5.1f}"]
    print("  ".join(row), flush=True)


def bench_e2e(label, stmt):
    code = ("import time\nfrom qvakit.algebra import make_spec\nfrom qvakit.axioms import *\n"
            f"t = time.perf_counter(); r = {stmt}; assert r.passed\nprint(time.perf_counter() - t)")
    out = {}
    for name, pure in (("pure", "1"), ("cython", "0")):
        env = dict(os.environ, QVAKIT_PURE=pure)
        proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[name] = float(proc.stdout.strip())
    print(f"{label:34s} pure {out['pure']:7.2f} s  cython {out['cython']:7.2f} s  x{out['pure'] / out['cython']:4.1f}",
          flush=True)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--quick", action="store_true")
    ns = p.parse_args()
    repeat = 2 if ns.quick else 5
    if _ckernels is None:
        print("compiled kernels not built; timing the pure path only")
    print("kernel: product of two R-factor chains")
    for family, N, arity, H in [("gl", 2, 3, 6), ("o", 3, 3, 6), ("o", 4, 3, 6), ("sp", 4, 3, 6), ("gl", 3, 4, 4),
                                ("o", 3, 4, 4)]:
        a, b = operands(family, N, arity, H)
        bench_kernel(f"{family}_{N} arity {arity} H={H}", a, b, repeat)
    if not ns.quick and _ckernels is not None:
        print("end to end: one sample of a check")
        for label, stmt in E2E.items():
            bench_e2e(label, stmt)


if __name__ == "__main__":
    main()
