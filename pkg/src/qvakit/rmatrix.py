"""Rational R-matrices of types A-D, their block products and fusion."""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import NamedTuple, Sequence

from . import config
from .errors import InternalConsistency, PoleAtSample, UnsupportedKind, UnsupportedN
from .report import CheckReport, run_exact, run_sampled
from .scalar import ZERO, HSeries, Rat, USeries, f_at, f_residuals, f_series, h_over, rat, series_mul
from .tensor import (
    _digits_table,
    TensorOp,
    compose,
    compose_all,
    compose_twisted,
    elementary_op,
    embed,
    inverse,
    rank_h0,
    transpose,
)


class RArg(NamedTuple):
    """Spectral argument base + hshift*h."""

    base: Rat
    hshift: Rat = Rat(0)

    def __add__(self, other) -> "RArg":
        if isinstance(other, RArg):
            return RArg(self.base + other.base, self.hshift + other.hshift)
        return RArg(self.base + rat(other), self.hshift)

    def __sub__(self, other) -> "RArg":
        if isinstance(other, RArg):
            return RArg(self.base - other.base, self.hshift - other.hshift)
        return RArg(self.base - rat(other), self.hshift)

    def __neg__(self) -> "RArg":
        return RArg(-self.base, -self.hshift)

    def shift(self, c) -> "RArg":
        return RArg(self.base, self.hshift + rat(c))


def arg(base, hshift=0) -> RArg:
    if isinstance(base, RArg):
        return base.shift(hshift)
    return RArg(rat(base), rat(hshift))


_F_CACHE: dict = {}


def f_coeffs(spec, K: int) -> USeries:
    """f to order u^-K, truncated from any longer series already known for spec."""
    key = (spec.family, spec.N, K)
    if key not in _F_CACHE:
        longer = [k for (fam, N, k) in _F_CACHE if (fam, N) == key[:2] and k > K]
        if longer:
            _F_CACHE[key] = USeries(_F_CACHE[key[:2] + (min(longer),)].coeffs[: K + 1])
        else:
            _F_CACHE[key] = f_series(spec, K)
    return _F_CACHE[key]


def seed_f_cache(spec, f: USeries) -> None:
    """Install externally loaded coefficients after re-checking both functional equations."""
    if any(f_residuals(spec, f)):
        raise InternalConsistency(f"cached f for {spec.label} fails its functional equations")
    _F_CACHE[(spec.family, spec.N, f.order)] = f


def f_for(spec, H: int) -> USeries:
    return f_coeffs(spec, max(config.f_order(), H - 1))


@lru_cache(maxsize=4096)
def _basis(spec, H: int) -> tuple:
    P = elementary_op("P", spec, H)
    Q = elementary_op("Q", spec, H) if spec.family != "gl" else None
    return TensorOp.identity(spec.N, 2, H), P, Q


def _coeff_op(op: TensorOp, s: Sequence) -> TensorOp:
    return op.scale(HSeries(s))


@lru_cache(maxsize=65536)
def r_single(spec, kind: str, a: RArg, H: int) -> TensorOp:
    """R(u), its normalization f(u/h)R(u) or the polynomial form at u = a."""
    a = arg(*a) if not isinstance(a, RArg) else a
    I, P, Q = _basis(spec, H)
    if kind == "polynomial":
        # gl: u - hP; o/sp: u(u - h kappa) - h(u - h kappa)P + h u Q
        u = (a.base, a.hshift)
        lin = HSeries([u[0], u[1]], H)
        if spec.family == "gl":
            return I.scale(lin) - P.scale(HSeries([0, 1], H))
        lin2 = HSeries([u[0], u[1] - spec.kappa], H)
        h = HSeries([0, 1], H)
        return I.scale(lin * lin2) - P.scale(h * lin2) + Q.scale(h * lin)
    if kind not in ("plain", "normalized"):
        raise UnsupportedKind(f"unknown R-matrix kind {kind!r}")
    if not a.base and kind == "normalized":
        raise PoleAtSample("normalized R-matrix at a pure-h argument")
    out = I - _coeff_op(P, h_over(a.base, a.hshift, H))
    if spec.family != "gl":
        out = out + _coeff_op(Q, h_over(a.base, a.hshift - spec.kappa, H))
    if kind == "normalized":
        out = out.scale(f_at(f_for(spec, H), a.base, H, a.hshift))
    return out


def r_at(spec, kind: str, a: RArg, H: int, arity: int, i: int, j: int) -> TensorOp:
    """R_{ij}(a) on `arity` factors (0-based i, j)."""
    return embed(r_single(spec, kind, a, H), arity, (i, j))


def r_inverse(spec, kind: str, a: RArg, H: int) -> TensorOp:
    return _r_inverse(spec, kind, a, H)


@lru_cache(maxsize=65536)
def _r_inverse(spec, kind, a, H):
    return inverse(r_single(spec, kind, a, H))


def block_factors(
    n: int,
    m: int,
    orient: tuple = (False, False),
    underlined: bool = False,
) -> list:
    """(i, j) pairs of a block product in multiplication order, j in 0..m-1.

    Plain blocks run i forward and j backward, underlined blocks run both
    forward; a True orientation flag reverses the corresponding loop.
    """
    bar1, bar2 = orient
    iis = list(range(n))
    if bar1:
        iis.reverse()
    jdir_forward = underlined != bar2
    jjs = list(range(m)) if jdir_forward else list(range(m - 1, -1, -1))
    return [(i, j) for i in iis for j in jjs]


def r_block(
    spec,
    kind: str,
    n: int,
    m: int,
    u: Sequence,
    v: Sequence,
    z,
    orient: tuple = (False, False),
    underlined: bool = False,
    H: int = 6,
    positions: tuple | None = None,
    arity: int | None = None,
    inverse_: bool = False,
) -> TensorOp:
    """Block product of R_{i, n+j}(z + u_i -/+ v_j).

    By default the result acts on n+m factors; `positions` (n+m entries)
    and `arity` place it inside a larger tensor power. With inverse_ the
    inverse block is returned, built as the reversed product of inverses.
    """
    z = arg(z) if not isinstance(z, RArg) else z
    u = [arg(x) if not isinstance(x, RArg) else x for x in u]
    v = [arg(x) if not isinstance(x, RArg) else x for x in v]
    if arity is None:
        arity = n + m
    if positions is None:
        positions = tuple(range(n + m))
    out = TensorOp.identity(spec.N, arity, H)
    pairs = block_factors(n, m, orient, underlined)
    if inverse_:
        pairs = pairs[::-1]
    for i, j in pairs:
        a = z + u[i] + v[j] if underlined else z + u[i] - v[j]
        r = r_inverse(spec, kind, a, H) if inverse_ else r_single(spec, kind, a, H)
        out = compose(out, embed(r, arity, (positions[i], positions[n + j])))
    return out


def r_fused(spec, n: int, u: Sequence, H: int, kind: str = "plain") -> TensorOp:
    """(1/n!) prod_{i<j} R_ij(u_i - u_j) in lexicographic order."""
    u = [arg(x) if not isinstance(x, RArg) else x for x in u]
    out = TensorOp.identity(spec.N, n, H)
    for i, j in itertools.combinations(range(n), 2):
        out = compose(out, r_at(spec, kind, u[i] - u[j], H, n, i, j))
    return out.scale(Rat(1, math.factorial(n)))


def staggered(spec, n: int, u0=0) -> list:
    """The tuple u_[n]: decreasing h-shifts for gl and sp, increasing for o."""
    if spec.family == "o":
        return [arg(u0, -(n - 1 - k)) for k in range(n)]
    return [arg(u0, -k) for k in range(n)]


def max_fusion(spec) -> int:
    return spec.N // 2 if spec.family == "sp" else spec.N


def idempotent(spec, n: int, H: int) -> TensorOp:
    """E_[n] from the fusion formula at the staggered tuple."""
    if n < 1 or n > max_fusion(spec):
        raise UnsupportedN(f"n={n} outside 1..{max_fusion(spec)} for {spec.label}")
    return _idempotent(spec, n, H)


@lru_cache(maxsize=256)
def _idempotent(spec, n, H):
    return r_fused(spec, n, staggered(spec, n), H)


def antisymmetrizer(N: int, n: int, H: int) -> TensorOp:
    """(1/n!) sum over permutations of sgn(p) times the factor permutation."""
    return _perm_average(N, n, H, True)


def symmetrizer(N: int, n: int, H: int) -> TensorOp:
    return _perm_average(N, n, H, False)


def _perm_average(N: int, n: int, H: int, signed: bool) -> TensorOp:
    D = N**n
    digs = _digits_table(N, n)
    index = {d: k for k, d in enumerate(digs)}
    acc: dict = {}
    for p in itertools.permutations(range(n)):
        inv = sum(1 for a, b in itertools.combinations(range(n), 2) if p[a] > p[b])
        sgn = -1 if signed and inv % 2 else 1
        for c, d in enumerate(digs):
            # the permutation moves factor k to position p[k]
            r = [0] * n
            for k in range(n):
                r[p[k]] = d[k]
            key = index[tuple(r)] * D + c
            acc[key] = acc.get(key, 0) + sgn
    f = Rat(1, math.factorial(n))
    z = (ZERO,) * (H - 1)
    return TensorOp(N, n, H, {k: (v * f,) + z for k, v in acc.items() if v})


# --- checks ---------------------------------------------------------------


def scaled_plain(spec, a: RArg, H: int) -> TensorOp:
    """The plain R-matrix with the P coefficient doubled.

    For gl this is Yang's R-matrix with h replaced by 2h, so it still
    solves the Yang-Baxter equation; for o and sp it does not.
    """
    _, P, _ = _basis(spec, H)
    return r_single(spec, "plain", a, H) - _coeff_op(P, h_over(a.base, a.hshift, H))


def mutated_plain(spec, a: RArg, H: int) -> TensorOp:
    """Negative control for every family: R(u) - (h/u)^2 P."""
    _, P, _ = _basis(spec, H)
    x = h_over(a.base, a.hshift, H)
    return r_single(spec, "plain", a, H) - _coeff_op(P, series_mul(x, x))


def check_qybe(spec, kind: str, H: int, samples: int = 5, seed: int = 0, mutate: str = "") -> CheckReport:
    """Yang-Baxter equation at seeded (u, v); mutate is "", "scaled" or "quadratic"."""

    def single(a):
        if mutate == "scaled":
            return scaled_plain(spec, a, H)
        if mutate == "quadratic":
            return mutated_plain(spec, a, H)
        return r_single(spec, kind, a, H)

    def fn(pt):
        u, v = arg(pt[0]), arg(pt[1])
        r12 = embed(single(u), 3, (0, 1))
        r13 = embed(single(u + v), 3, (0, 2))
        r23 = embed(single(v), 3, (1, 2))
        return compose_all([r12, r13, r23]), compose_all([r23, r13, r12])

    cid = f"qybe-{mutate}" if mutate else "qybe"
    return run_sampled(cid, {"spec": spec.label, "kind": kind, "H": H}, seed, samples, 2, H, fn)


SYMMETRIES = ("unitarity", "crossing_t", "crossing_prime", "crossing_LR", "crossing_RL", "prime_shift")


def symmetry_sides(spec, which: str, u: RArg, H: int) -> tuple:
    """Both sides of one normalized R-matrix symmetry at u."""
    R = lambda a: r_single(spec, "normalized", a, H)  # noqa: E731
    I = TensorOp.identity(spec.N, 2, H)
    gl = spec.family == "gl"
    N, kap = spec.N, spec.kappa
    if which == "unitarity":
        return compose(R(u), R(-u)), I
    if which == "crossing_t":
        if not gl:
            raise UnsupportedKind("crossing_t is the gl form")
        return compose(transpose(R(-u), [0]), transpose(R(u.shift(N)), [0])), I
    if which == "crossing_prime":
        if gl:
            raise UnsupportedKind("crossing_prime needs o or sp")
        return compose(R(u), transpose(R(u.shift(kap)), [0], "prime", spec)), I
    if which in ("crossing_LR", "crossing_RL"):
        opp = [1] if which == "crossing_LR" else [0]
        if gl:
            return compose_twisted(R(-u), R(u.shift(N)), opp), I
        return compose_twisted(transpose(R(u), [0], "prime", spec), R(u.shift(kap)), opp), I
    if which == "prime_shift":
        if gl:
            raise UnsupportedKind("prime_shift needs o or sp")
        return transpose(R(-u), [0], "prime", spec), R(u.shift(kap))
    raise UnsupportedKind(f"unknown symmetry {which!r}")


def family_symmetries(spec) -> list:
    if spec.family == "gl":
        return ["unitarity", "crossing_t", "crossing_LR", "crossing_RL"]
    return ["unitarity", "crossing_prime", "crossing_LR", "crossing_RL", "prime_shift"]


def check_symmetries(spec, which: str, H: int, samples: int = 5, seed: int = 0) -> CheckReport:
    symmetry_sides(spec, which, arg(1), 1)  # validate the family/variant pair up front

    def fn(pt):
        return symmetry_sides(spec, which, arg(pt[0]), H)

    return run_sampled(f"symmetry-{which}", {"spec": spec.label, "H": H}, seed, samples, 1, H, fn)


def fusion_rank(spec, n: int) -> int:
    """Dimension of the fused subspace: exterior power, traceless symmetric or traceless exterior."""
    N = spec.N
    c = lambda a, b: math.comb(a, b) if 0 <= b <= a else 0  # noqa: E731
    if spec.family == "gl":
        return c(N, n)
    if spec.family == "o":
        return c(N + n - 1, n) - c(N + n - 3, n - 2)
    return c(N, n) - c(N, n - 2)


def _absorbs(spec, n: int, E: TensorOp, H: int) -> tuple:
    """Both sides of the family's absorption identities for E_[n]."""
    if spec.family == "gl" or n < 2:
        return [], []
    sym = symmetrizer if spec.family == "o" else antisymmetrizer
    lhs, rhs = [compose(sym(spec.N, n, H), E)], [E]
    zero = TensorOp.zero(spec.N, n, H)
    Q = elementary_op("Q", spec, H)
    for i in range(n - 1):
        lhs.append(compose(embed(Q, n, (i, i + 1)), E))
        rhs.append(zero)
    return lhs, rhs


def check_fusion(spec, n: int, H: int, samples: int = 5, seed: int = 0) -> list:
    """Fusion reports: base-point independence, idempotency, rank and family identities."""
    params = {"spec": spec.label, "n": n, "H": H}
    E = idempotent(spec, n, H)

    def base(pt):
        return r_fused(spec, n, staggered(spec, n, pt[0]), H), E

    out = [
        run_sampled("fusion-staggered", params, seed, samples, 1, H, base),
        run_exact("fusion-idempotent", params, seed, H, lambda: (compose(E, E), E)),
        run_exact("fusion-rank", params, seed, H, lambda: (rank_h0(E), fusion_rank(spec, n))),
    ]
    if spec.family == "gl":
        out.append(run_exact("fusion-antisymmetrizer", params, seed, H,
                             lambda: (E, antisymmetrizer(spec.N, n, H))))
    elif n >= 2:
        out.append(run_exact("fusion-absorption", params, seed, H, lambda: _absorbs(spec, n, E, H)))
    return out


def check_f_series(spec, K: int, seed: int = 0) -> list:
    """Both functional equations of f to order u^-K, and c_1 = 1/N for gl."""
    f = f_coeffs(spec, K)
    params = {"spec": spec.label, "K": K}
    res = f_residuals(spec, f)
    out = [run_exact("f-series-equations", params, seed, K + 1, lambda: (res, [ZERO] * len(res)))]
    if spec.family == "gl":
        out.append(run_exact("f-series-c1", params, seed, K + 1, lambda: (f.coeffs[1], Rat(1, spec.N))))
    return out
