"""Sparse operators on tensor powers of C^N with truncated h-series entries.

Factor positions are 0-based; the leftmost factor is the most significant
digit of a flat basis index. Entries are keyed by ``row * D + col`` with
``D = N ** arity``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import EmbeddingError, NonInvertible, ShapeMismatch, UnsupportedKind
from .kernels import spmm
from .scalar import ONE, ZERO, HSeries, rat, rat_str, series_mul


@lru_cache(maxsize=None)
def _digits_table(N: int, n: int) -> tuple:
    return tuple(itertools.product(range(N), repeat=n))


@lru_cache(maxsize=None)
def _place_table(N: int, n: int, positions: tuple) -> tuple:
    """Flat-index contribution of each local multi-index placed at `positions`."""
    w = [N ** (n - 1 - p) for p in positions]
    return tuple(sum(d * wi for d, wi in zip(ds, w)) for ds in _digits_table(N, len(positions)))


def _unit(H: int) -> tuple:
    return (ONE,) + (ZERO,) * (H - 1)


def _scale(s: tuple, c) -> tuple:
    return tuple(x * c for x in s)


def _add(s: tuple, t: tuple) -> tuple:
    return tuple(x + y for x, y in zip(s, t))


class TensorOp:
    """Immutable sparse operator on (C^N)^{tensor n}."""

    __slots__ = ("N", "arity", "H", "entries")

    def __init__(self, N: int, arity: int, H: int, entries: dict | None = None):
        self.N = N
        self.arity = arity
        self.H = H
        self.entries = entries if entries is not None else {}

    @property
    def D(self) -> int:
        return self.N ** self.arity

    # construction

    @classmethod
    def identity(cls, N: int, arity: int, H: int) -> "TensorOp":
        D = N**arity
        one = _unit(H)
        return cls(N, arity, H, {i * D + i: one for i in range(D)})

    @classmethod
    def zero(cls, N: int, arity: int, H: int) -> "TensorOp":
        return cls(N, arity, H, {})

    @classmethod
    def from_entries(cls, N: int, arity: int, H: int, items: Iterable) -> "TensorOp":
        """Build from (row digits, col digits, coefficients) triples, accumulating repeats."""
        D = N**arity
        w = [N ** (arity - 1 - p) for p in range(arity)]
        acc: dict = {}
        for r, c, coeffs in items:
            if len(r) != arity or len(c) != arity:
                raise ShapeMismatch("multi-index length differs from arity")
            s = tuple((list(rat(x) for x in coeffs) + [ZERO] * H)[:H])
            k = sum(a * b for a, b in zip(r, w)) * D + sum(a * b for a, b in zip(c, w))
            acc[k] = _add(acc[k], s) if k in acc else s
        return cls(N, arity, H, {k: v for k, v in acc.items() if any(v)})

    # comparison and inspection

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TensorOp)
            and (self.N, self.arity, self.H) == (other.N, other.arity, other.H)
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return f"TensorOp(N={self.N}, arity={self.arity}, H={self.H}, nnz={len(self.entries)})"

    def entry(self, row: Sequence[int], col: Sequence[int]) -> tuple:
        w = [self.N ** (self.arity - 1 - p) for p in range(self.arity)]
        k = sum(a * b for a, b in zip(row, w)) * self.D + sum(a * b for a, b in zip(col, w))
        return self.entries.get(k, (ZERO,) * self.H)

    def order_part(self, k: int) -> dict:
        """The h^k coefficient matrix as a sparse {key: Rat} dict."""
        return {key: s[k] for key, s in self.entries.items() if s[k]}

    def first_difference(self, other: "TensorOp") -> int | None:
        """Lowest h-order where self and other differ, or None when equal."""
        self._check(other)
        keys = set(self.entries) | set(other.entries)
        z = (ZERO,) * self.H
        best = None
        for k in keys:
            a, b = self.entries.get(k, z), other.entries.get(k, z)
            if a != b:
                for i in range(self.H if best is None else best):
                    if a[i] != b[i]:
                        best = i
                        break
        return best

    def is_identity(self) -> bool:
        return self == TensorOp.identity(self.N, self.arity, self.H)

    def is_scalar(self) -> bool:
        D = self.D
        if any(k // D != k % D for k in self.entries):
            return False
        return len(self.entries) in (0, D) and len(set(self.entries.values())) <= 1

    def dump(self) -> str:
        """One line per nonzero entry: 1-based row digits, col digits, coefficients."""
        D = self.D
        digs = _digits_table(self.N, self.arity)
        lines = []
        for k in sorted(self.entries):
            r, c = divmod(k, D)
            rs = ",".join(str(d + 1) for d in digs[r])
            cs = ",".join(str(d + 1) for d in digs[c])
            lines.append(f"{rs} {cs} [{','.join(rat_str(x) for x in self.entries[k])}]")
        return "\n".join(lines)

    # arithmetic

    def _check(self, other: "TensorOp") -> None:
        if (self.N, self.arity, self.H) != (other.N, other.arity, other.H):
            raise ShapeMismatch(
                f"shapes (N={self.N}, n={self.arity}, H={self.H}) and "
                f"(N={other.N}, n={other.arity}, H={other.H})"
            )

    def __add__(self, other: "TensorOp") -> "TensorOp":
        self._check(other)
        out = dict(self.entries)
        for k, s in other.entries.items():
            if k in out:
                t = _add(out[k], s)
                if any(t):
                    out[k] = t
                else:
                    del out[k]
            else:
                out[k] = s
        return TensorOp(self.N, self.arity, self.H, out)

    def __neg__(self) -> "TensorOp":
        return TensorOp(self.N, self.arity, self.H, {k: _scale(s, -1) for k, s in self.entries.items()})

    def __sub__(self, other: "TensorOp") -> "TensorOp":
        return self + (-other)

    def scale(self, c) -> "TensorOp":
        """Multiply by a rational or by an HSeries."""
        if isinstance(c, HSeries):
            if c.order != self.H:
                raise ShapeMismatch("series order differs from operator order")
            out = {}
            for k, s in self.entries.items():
                t = series_mul(s, c.coeffs)
                if any(t):
                    out[k] = t
            return TensorOp(self.N, self.arity, self.H, out)
        c = rat(c)
        if not c:
            return TensorOp.zero(self.N, self.arity, self.H)
        return TensorOp(self.N, self.arity, self.H, {k: _scale(s, c) for k, s in self.entries.items()})

    def __matmul__(self, other: "TensorOp") -> "TensorOp":
        return compose(self, other)

    def truncate(self, H: int) -> "TensorOp":
        out = {k: s[:H] for k, s in self.entries.items() if any(s[:H])}
        return TensorOp(self.N, self.arity, H, out)

    def inverse(self) -> "TensorOp":
        return inverse(self)


# --- elementary operators --------------------------------------------------


def elementary_op(kind: str, spec, H: int, i: int | None = None, j: int | None = None) -> TensorOp:
    """I, P, Q (arity 2), e(i,j) and G (arity 1); e(i,j) takes 1-based indices."""
    N = spec.N
    eps = spec.eps_table
    one = [ONE]
    if kind == "I":
        return TensorOp.identity(N, 2, H)
    if kind == "P":
        return TensorOp.from_entries(N, 2, H, (((b, a), (a, b), one) for a in range(N) for b in range(N)))
    if kind == "Q":
        if spec.family == "gl":
            raise UnsupportedKind("Q is defined for o and sp only")
        pr = spec.prime_index
        return TensorOp.from_entries(
            N, 2, H, (((a, pr(a)), (b, pr(b)), [eps[a] * eps[b]]) for a in range(N) for b in range(N))
        )
    if kind == "G":
        if spec.family == "gl":
            raise UnsupportedKind("G is defined for o and sp only")
        return TensorOp.from_entries(N, 1, H, (((a,), (spec.prime_index(a),), [eps[a]]) for a in range(N)))
    if kind == "e":
        if i is None or j is None or not (1 <= i <= N and 1 <= j <= N):
            raise EmbeddingError(f"matrix unit e({i},{j}) out of range for N={N}")
        return TensorOp.from_entries(N, 1, H, [((i - 1,), (j - 1,), one)])
    raise UnsupportedKind(f"unknown elementary operator {kind!r}")


# --- structural operations -------------------------------------------------


def compose(a: TensorOp, b: TensorOp) -> TensorOp:
    a._check(b)
    return TensorOp(a.N, a.arity, a.H, spmm(a.entries, b.entries, a.D, a.H))


def compose_all(ops: Sequence[TensorOp]) -> TensorOp:
    out = ops[0]
    for op in ops[1:]:
        out = compose(out, op)
    return out


def _check_positions(positions: Sequence[int], n: int) -> tuple:
    pos = tuple(positions)
    if len(set(pos)) != len(pos) or any(p < 0 or p >= n for p in pos):
        raise EmbeddingError(f"factor positions {pos} invalid for arity {n}")
    return pos


def embed(op: TensorOp, target_arity: int, at: Sequence[int]) -> TensorOp:
    """Act with `op` on factors `at` (in that order) and by the identity elsewhere."""
    at = tuple(at)
    if len(at) != op.arity:
        raise EmbeddingError(f"{len(at)} positions for an operator of arity {op.arity}")
    _check_positions(at, target_arity)
    N, n = op.N, target_arity
    rest = tuple(p for p in range(n) if p not in at)
    D, d = N**n, op.D
    place = _place_table(N, n, at)
    others = _place_table(N, n, rest)
    out = {}
    for k, s in op.entries.items():
        r, c = divmod(k, d)
        pr, pc = place[r], place[c]
        for o in others:
            out[(pr + o) * D + pc + o] = s
    return TensorOp(N, n, op.H, out)


def kron(a: TensorOp, b: TensorOp) -> TensorOp:
    """a on the leading factors, b on the trailing ones."""
    if (a.N, a.H) != (b.N, b.H):
        raise ShapeMismatch("kron needs equal N and H")
    da, db = a.D, b.D
    D = da * db
    out = {}
    for ka, s in a.entries.items():
        ra, ca = divmod(ka, da)
        for kb, t in b.entries.items():
            rb, cb = divmod(kb, db)
            v = series_mul(s, t)
            if any(v):
                out[(ra * db + rb) * D + ca * db + cb] = v
    return TensorOp(a.N, a.arity + b.arity, a.H, out)


@lru_cache(maxsize=256)
def _digit_part(N: int, n: int, at: tuple) -> tuple:
    """For each index, the part of its value carried by the digits at `at`."""
    w = [N ** (n - 1 - p) for p in at]
    return tuple(sum(((x // wi) % N) * wi for wi in w) for x in range(N**n))


def transpose(a: TensorOp, at: Iterable[int], kind: str = "t", spec=None) -> TensorOp:
    """Partial transpose on the factors `at`.

    kind "t" swaps row and column digits; kind "prime" maps (a_ij) to
    eps_i eps_j a_{j'i'} on each named factor and needs an o or sp spec.
    """
    at = _check_positions(sorted(set(at)), a.arity)
    if kind == "prime":
        if spec is None or spec.family == "gl":
            raise UnsupportedKind("prime transpose is defined for o and sp only")
        if spec.N != a.N:
            raise ShapeMismatch(f"spec {spec.label} on an operator with N={a.N}")
        eps = spec.eps_table
        pr = spec.prime_index
    elif kind != "t":
        raise UnsupportedKind(f"unknown transpose kind {kind!r}")
    if not at:
        return a
    N, n, D = a.N, a.arity, a.D
    if kind == "t":
        part = _digit_part(N, n, tuple(at))
        out = {}
        for k, s in a.entries.items():
            r, c = divmod(k, D)
            pr, pc = part[r], part[c]
            out[(r - pr + pc) * D + c - pc + pr] = s
        return TensorOp(N, n, a.H, out)
    digs = _digits_table(N, n)
    w = [N ** (n - 1 - p) for p in range(n)]
    out = {}
    for k, s in a.entries.items():
        r, c = divmod(k, D)
        rd, cd = list(digs[r]), list(digs[c])
        sign = 1
        for p in at:
            x, y = rd[p], cd[p]
            if kind == "t":
                rd[p], cd[p] = y, x
            else:
                # old (x, y) lands at (i, j) with j' = x and i' = y
                i, j = pr(y), pr(x)
                sign *= eps[i] * eps[j]
                rd[p], cd[p] = i, j
        key = sum(d * wi for d, wi in zip(rd, w)) * D + sum(d * wi for d, wi in zip(cd, w))
        out[key] = s if sign == 1 else _scale(s, -1)
    return TensorOp(N, n, a.H, out)


def compose_twisted(a: TensorOp, b: TensorOp, opposite: Iterable[int]) -> TensorOp:
    """Product that is opposite (b then a) on the factors in `opposite`."""
    opp = sorted(set(opposite))
    if not opp:
        return compose(a, b)
    return transpose(compose(transpose(a, opp), transpose(b, opp)), opp)


def partial_trace(a: TensorOp, over: Iterable[int]) -> TensorOp:
    over = _check_positions(sorted(set(over)), a.arity)
    N, n, D = a.N, a.arity, a.D
    keep = tuple(p for p in range(n) if p not in over)
    m = len(keep)
    Dm = N**m
    digs = _digits_table(N, n)
    wk = [N ** (m - 1 - q) for q in range(m)]
    acc: dict = {}
    for k, s in a.entries.items():
        r, c = divmod(k, D)
        rd, cd = digs[r], digs[c]
        if any(rd[p] != cd[p] for p in over):
            continue
        nr = sum(rd[p] * w for p, w in zip(keep, wk))
        nc = sum(cd[p] * w for p, w in zip(keep, wk))
        key = nr * Dm + nc
        acc[key] = _add(acc[key], s) if key in acc else s
    return TensorOp(N, m, a.H, {k: v for k, v in acc.items() if any(v)})


def trace(a: TensorOp) -> HSeries:
    t = partial_trace(a, range(a.arity))
    return HSeries(t.entries.get(0, (ZERO,) * a.H))


def permute(a: TensorOp, perm: Sequence[int]) -> TensorOp:
    """Move factor k of `a` to position perm[k]."""
    return embed(a, a.arity, perm)


def _constant_inverse(a: TensorOp) -> TensorOp:
    # Gauss-Jordan on the h^0 matrix; dense, used only when it is not I
    D = a.D
    M = [[ZERO] * D for _ in range(D)]
    for k, s in a.entries.items():
        r, c = divmod(k, D)
        M[r][c] = s[0]
    inv = [[ONE if i == j else ZERO for j in range(D)] for i in range(D)]
    for col in range(D):
        piv = next((r for r in range(col, D) if M[r][col]), None)
        if piv is None:
            raise NonInvertible("constant part of the operator is singular")
        M[col], M[piv] = M[piv], M[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        f = ONE / M[col][col]
        M[col] = [x * f for x in M[col]]
        inv[col] = [x * f for x in inv[col]]
        for r in range(D):
            if r != col and M[r][col]:
                g = M[r][col]
                M[r] = [x - g * y for x, y in zip(M[r], M[col])]
                inv[r] = [x - g * y for x, y in zip(inv[r], inv[col])]
    z = (ZERO,) * (a.H - 1)
    out = {r * D + c: (inv[r][c],) + z for r in range(D) for c in range(D) if inv[r][c]}
    return TensorOp(a.N, a.arity, a.H, out)


def inverse(a: TensorOp) -> TensorOp:
    """Inverse modulo h^H, via the Neumann series around the constant part."""
    I = TensorOp.identity(a.N, a.arity, a.H)
    c0 = TensorOp(a.N, a.arity, a.H, {k: (s[0],) + (ZERO,) * (a.H - 1) for k, s in a.entries.items() if s[0]})
    if c0 == I:
        pre = None
        x = a
    else:
        pre = _constant_inverse(a)
        x = compose(pre, a)
    nil = I - x
    out, term = I, I
    for _ in range(1, a.H):
        term = compose(term, nil)
        if not term.entries:
            break
        out = out + term
    return out if pre is None else compose(out, pre)


def scalar_series_op(s: HSeries, N: int, arity: int) -> TensorOp:
    return TensorOp.identity(N, arity, s.order).scale(s)


def rank_h0(a: TensorOp) -> int:
    """Rank of the h^0 coefficient matrix over the rationals."""
    D = a.D
    rows: dict = {}
    for k, s in a.entries.items():
        if s[0]:
            r, c = divmod(k, D)
            rows.setdefault(r, {})[c] = s[0]
    rank = 0
    pivots: dict = {}
    for r in rows.values():
        v = dict(r)
        for pc, pv in pivots.items():
            if pc in v:
                f = v[pc]
                for c, x in pv.items():
                    v[c] = v.get(c, ZERO) - f * x
                v = {c: x for c, x in v.items() if x}
        if v:
            pc = min(v)
            f = ONE / v[pc]
            pv = {c: x * f for c, x in v.items()}
            for oc in list(pivots):
                ov = pivots[oc]
                if pc in ov:
                    g = ov[pc]
                    for c, x in pv.items():
                        ov[c] = ov.get(c, ZERO) - g * x
                    pivots[oc] = {c: x for c, x in ov.items() if x}
            pivots[pc] = pv
            rank += 1
    return rank
