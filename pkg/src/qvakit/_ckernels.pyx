# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse kernels; same contract as the pure-Python module."""

from gmpy2 cimport *
from cpython.list cimport PyList_GET_ITEM

cdef extern from "gmp.h":
    void mpq_init(mpq_ptr)
    void mpq_clear(mpq_ptr)
    void mpq_mul(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_add(mpq_ptr, mpq_srcptr, mpq_srcptr)

import_gmpy2()


cdef inline bint _nonzero(mpq x):
    return MPQ(x)[0]._mp_num._mp_size != 0


cdef list _support(tuple s):
    cdef list out = []
    cdef Py_ssize_t i
    for i in range(len(s)):
        if _nonzero(<mpq>s[i]):
            out.append((i, s[i]))
    return out


def spmm(dict a, dict b, Py_ssize_t D, Py_ssize_t H):
    cdef dict brows = {}
    cdef dict acc = {}
    cdef Py_ssize_t r, c, m, key, base, i, j, n
    cdef list row, ss, ts, cur
    cdef object k, s, t
    cdef mpq x, y, dst
    cdef mpq_t tmp
    for k, t in b.items():
        r = k // D
        c = k - r * D
        row = brows.get(r)
        if row is None:
            row = brows[r] = []
        row.append((c, _support(t)))
    mpq_init(tmp)
    try:
        for k, s in a.items():
            r = k // D
            m = k - r * D
            row = brows.get(m)
            if not row:
                continue
            ss = _support(s)
            base = r * D
            for c, ts in row:
                key = base + c
                cur = acc.get(key)
                if cur is None:
                    # fresh accumulators owned by this call only
                    cur = [GMPy_MPQ_New(NULL) for n in range(H)]
                    acc[key] = cur
                for i, x in ss:
                    for j, y in ts:
                        if i + j < H:
                            dst = <mpq>PyList_GET_ITEM(cur, i + j)
                            mpq_mul(tmp, MPQ(x), MPQ(y))
                            mpq_add(MPQ(dst), MPQ(dst), tmp)
    finally:
        mpq_clear(tmp)
    out = {}
    for k, cur in acc.items():
        for n in range(H):
            if _nonzero(<mpq>cur[n]):
                out[k] = tuple(cur)
                break
    return out
