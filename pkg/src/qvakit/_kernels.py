"""Pure-Python sparse kernels over truncated series entries."""

from gmpy2 import mpq

ZERO = mpq(0)


def _support(s):
    return [(i, c) for i, c in enumerate(s) if c]


def spmm(a, b, D, H):
    """Product of two sparse D x D matrices with series entries.

    Entries are keyed by row*D + col and hold length-H tuples of mpq.
    Products are truncated at h^H and all-zero results are dropped.
    """
    brows = {}
    for k, t in b.items():
        r, c = divmod(k, D)
        brows.setdefault(r, []).append((c, _support(t)))
    acc = {}
    for k, s in a.items():
        r, m = divmod(k, D)
        row = brows.get(m)
        if not row:
            continue
        ss = _support(s)
        base = r * D
        for c, ts in row:
            key = base + c
            cur = acc.get(key)
            if cur is None:
                cur = acc[key] = [ZERO] * H
            for i, x in ss:
                for j, y in ts:
                    if i + j < H:
                        cur[i + j] += x * y
    return {k: tuple(v) for k, v in acc.items() if any(v)}
