"""Module maps over Yangians, generalized Yangians and reflection algebras.

Every generator series is realized on quantum factors by products of
normalized R-matrices at generic points (an EvalModule). An operator on
one auxiliary factor followed by the L quantum factors stands for the
generator matrix; traced fused products give the commuting families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .config import budget
from .errors import PoleAtSample, UnsupportedFamily, UnsupportedKind, UnsupportedN
from .qva import (
    EvalModule,
    LevelContext,
    apply_ops,
    call,
    make_word,
    program,
)
from .report import MAX_RESAMPLE, CheckReport, Sampler, compare_ops, run_sampled, skipped
from .rmatrix import RArg, arg, idempotent, max_fusion, r_block, r_inverse, r_single, staggered
from .scalar import HSeries, Rat
from .tensor import TensorOp, compose, elementary_op, embed, partial_trace, transpose

KIND = "normalized"


# --- generator matrices -----------------------------------------------------


def eval_T(em: EvalModule, z, H: int) -> TensorOp:
    """prod_k Rbar_{0,k}(z - a_k) on 1 + L factors."""
    z = arg(z) if not isinstance(z, RArg) else z
    return _eval_T(em, z, H)


@lru_cache(maxsize=4096)
def _eval_T(em, z, H):
    spec = em.spec
    n = 1 + em.L
    out = TensorOp.identity(spec.N, n, H)
    for k, a in enumerate(em.points, start=1):
        out = compose(out, embed(r_single(spec, KIND, z - a, H), n, (0, k)))
    return out


@lru_cache(maxsize=4096)
def _eval_T_inv(em, z, H):
    spec = em.spec
    n = 1 + em.L
    out = TensorOp.identity(spec.N, n, H)
    for k, a in reversed(list(enumerate(em.points, start=1))):
        out = compose(out, embed(r_inverse(spec, KIND, z - a, H), n, (0, k)))
    return out


def eval_B(em: EvalModule, z, H: int) -> TensorOp:
    """B(z) = T(z) T(-z)^{-1}."""
    z = arg(z) if not isinstance(z, RArg) else z
    return compose(_eval_T(em, z, H), _eval_T_inv(em, -z, H))


def twist_generator(spec, H: int) -> TensorOp:
    """A fixed nonzero X with X' = -X for o and sp; any X works for gl."""
    e = lambda i, j: elementary_op("e", spec, H, i, j)  # noqa: E731
    if spec.family == "gl":
        return e(1, 2) + e(2, 1).scale(Rat(2)) - e(1, 1)
    X0 = e(1, 2)
    return X0 - transpose(X0, [0], "prime", spec)


@lru_cache(maxsize=64)
def twist(spec, H: int) -> TensorOp:
    """exp(hX) truncated at h^H."""
    X = twist_generator(spec, H)
    out = TensorOp.identity(spec.N, 1, H)
    power = TensorOp.identity(spec.N, 1, H)
    h = (Rat(0), Rat(1)) + (Rat(0),) * (H - 2) if H > 1 else (Rat(0),)

    hs = HSeries(h)
    for k in range(1, H):
        power = compose(power, X).scale(hs)
        out = out + power.scale(Rat(1, math.factorial(k)))
    return out


def eval_L(em: EvalModule, z, H: int) -> TensorOp:
    """Generalized Yangian generator exp(hX) T(z)."""
    K = embed(twist(em.spec, H), 1 + em.L, (0,))
    return compose(K, eval_T(em, z, H))


@dataclass(frozen=True)
class OpFamily:
    """Generator matrix of one kind over a fixed EvalModule."""

    tag: str
    em: EvalModule
    H: int

    def __post_init__(self):
        if self.tag not in ("T", "L", "B"):
            raise UnsupportedKind(f"unknown generator family {self.tag!r}")
        if self.tag == "B" and self.em.spec.family != "gl":
            raise UnsupportedFamily("reflection algebras are realized for gl only")

    @property
    def spec(self):
        return self.em.spec

    def build(self, z) -> TensorOp:
        return {"T": eval_T, "L": eval_L, "B": eval_B}[self.tag](self.em, z, self.H)


FAMILY_OF_KIND = {"yangian": "T", "generalized_yangian": "L", "reflection": "B"}


@dataclass(frozen=True)
class ModuleKind:
    tag: str

    def __post_init__(self):
        if self.tag not in FAMILY_OF_KIND:
            raise UnsupportedKind(f"unknown module kind {self.tag!r}")

    @property
    def pair(self) -> tuple:
        return ("mu", "nu") if self.tag == "reflection" else ("sigma", "rho")

    @property
    def family(self) -> str:
        return FAMILY_OF_KIND[self.tag]


# --- module maps --------------------------------------------------------------


def _gen_at(fam: OpFamily, w: RArg, p: int, arity: int) -> TensorOp:
    L = fam.em.L
    return embed(fam.build(w), arity, (p,) + tuple(range(arity - L, arity)))


def module_word(fam: OpFamily, struct: tuple, shifts: Sequence, order: Sequence[int] | None = None) -> TensorOp:
    """Y_W of each slot at its shift, multiplied in `order` on the common module.

    Auxiliary factors are the letters' positions; the module's L factors
    come last.
    """
    spec, H = fam.spec, fam.H
    A = sum(len(s) for s in struct)
    arity = A + fam.em.L
    out = TensorOp.identity(spec.N, arity, H)
    for k in order if order is not None else range(len(struct)):
        slot, z = struct[k], shifts[k]
        z = arg(z) if not isinstance(z, RArg) else z
        if fam.tag != "B":
            for l in slot:
                out = compose(out, _gen_at(fam, z + l.arg, l.pos, arity))
            continue
        # B_[n](s|z): B_i(z + s_i) followed by Rbar_{ij}(2z + s_i + s_j) for j > i
        for i, li in enumerate(slot):
            out = compose(out, _gen_at(fam, z + li.arg, li.pos, arity))
            for lj in slot[i + 1:]:
                r = r_single(spec, KIND, z + z + li.arg + lj.arg, H)
                out = compose(out, embed(r, arity, (li.pos, lj.pos)))
    return out


def module_map(kind: ModuleKind, em: EvalModule, n: int, u: Sequence, z, H: int) -> TensorOp:
    """Realized Y_W(T+_[n](u) 1, z) on n auxiliary factors and the module's factors."""
    fam = OpFamily(kind.family, em, H)
    return module_word(fam, make_word(list(u)[:n]), [z])


def block_B(em: EvalModule, n: int, u: Sequence, z, H: int) -> TensorOp:
    return module_map(ModuleKind("reflection"), em, n, u, z, H)


def fused_series(fam: OpFamily, n: int, z) -> TensorOp:
    """tr E_[n] Y_W(T+_[n](u_[n]) 1, z) with u_[n] staggered at 0: an operator on the module."""
    spec, H = fam.spec, fam.H
    if n < 1 or n > max_fusion(spec):
        raise UnsupportedN(f"n={n} outside 1..{max_fusion(spec)} for {spec.label}")
    W = module_word(fam, make_word(staggered(spec, n, 0)), [z])
    E = embed(idempotent(spec, n, H), W.arity, range(n))
    return partial_trace(compose(E, W), range(n))


# --- checks -----------------------------------------------------------------


def _modules(spec, pt: Sequence, L: int) -> EvalModule:
    return EvalModule(spec, tuple(pt[:L]))


def _params(spec, H, **kw) -> dict:
    d = {"spec": spec.label, "H": H}
    d.update(kw)
    return d


def deformed_axioms_check(kind: ModuleKind, spec, n: int, m: int, H: int = 4, samples: int = 5, seed: int = 0,
                          L: int = 1) -> list:
    """Vacuum property, nu-associativity and mu-commutativity for words of lengths n and m.

    Sample points are (z0, z1, z2, u..., v..., a...).
    """
    mu, nu = kind.pair
    if kind.tag == "reflection":
        if spec.family != "gl":
            raise UnsupportedFamily("the reflection kind pairs with (mu, nu), which needs gl")
        ctx = LevelContext.critical(spec, H)
    else:
        ctx = LevelContext.at_level(spec, spec.c_crit + 1, H)
    params = _params(spec, H, kind=kind.tag, n=n, m=m, L=L)
    nv = 3 + n + m + L
    if n + m + L > budget():
        return [skipped(f"deformed-{c}", params, seed) for c in ("vacuum", "associativity", "commutativity")]

    def setup(pt):
        z0, z1, z2 = (arg(x) for x in pt[:3])
        u, v = pt[3:3 + n], pt[3 + n:3 + n + m]
        fam = OpFamily(kind.family, _modules(spec, pt[3 + n + m:], L), H)
        return z0, z1, z2, make_word(u, v), fam

    def vacuum(pt):
        z0, z1, z2, struct, fam = setup(pt)
        lhs = [module_word(fam, make_word([]), [z1])]
        rhs = [TensorOp.identity(spec.N, L, H)]
        # Y_W(v, z) applied after the vacuum: the empty first word changes nothing
        st = make_word([], [l.arg for l in struct[1]])
        lhs.append(module_word(fam, st, [z1, z2]))
        rhs.append(module_word(fam, st, [z0, z2]))
        return lhs, rhs

    def assoc(pt):
        z0, z1, z2, struct, fam = setup(pt)
        lhs = module_word(fam, struct, [z2 + z0, z2])
        vname = "Ynu" if nu == "nu" else "Yrho"
        ops, merged = program(ctx, call(vname, (0, 1), z0, z2), struct)
        rhs = apply_ops(module_word(fam, merged, [z2]), ops)
        return lhs, rhs

    def comm(pt):
        z0, z1, z2, struct, fam = setup(pt)
        ops, _ = program(ctx, call(mu, (0, 1), z1 - z2, z2), struct)
        lhs = apply_ops(module_word(fam, struct, [z1, z2]), ops)
        rhs = module_word(fam, struct, [z1, z2], order=(1, 0))
        return lhs, rhs

    return [
        run_sampled("deformed-vacuum", params, seed, samples, nv, H, vacuum),
        run_sampled(f"deformed-{nu}-associativity", params, seed, samples, nv, H, assoc),
        run_sampled(f"deformed-{mu}-commutativity", params, seed, samples, nv, H, comm),
    ]


def _commutator(a: TensorOp, b: TensorOp) -> TensorOp:
    return compose(a, b) - compose(b, a)


def commutativity_check(series: str, spec, n1: int, n2: int, H: int = 4, grid: int = 4, seed: int = 0,
                        L: int = 2) -> CheckReport:
    """[S_[n1](z), S_[n2](w)] = 0 for the traced series of one generator family.

    The module is fixed by the seed; the grid supplies grid*grid pairs (z, w).
    """
    tag = {"T_minus": "T", "L": "L", "B": "B"}[series]
    params = _params(spec, H, series=series, n1=n1, n2=n2, L=L)
    if max(n1, n2) + L > budget():
        return skipped(f"commutative-{series}", params, seed)
    fam = OpFamily(tag, _fixed_module(spec, L, seed), H)
    return _pairs(f"commutative-{series}", params, seed, grid, H,
                  lambda z, w: (_commutator(fused_series(fam, n1, z), fused_series(fam, n2, w)),
                                TensorOp.zero(spec.N, L, H)))


def _fixed_module(spec, L: int, seed: int) -> EvalModule:
    s = Sampler(seed + 7919)
    while True:
        pts = tuple(s.rat() for _ in range(L))
        if len(set(pts)) == L:
            return EvalModule(spec, pts)


def _pairs(check_id: str, params: dict, seed: int, grid: int, H: int, fn) -> CheckReport:
    """fn(z, w) -> (lhs, rhs) on the product of `grid` z-values and `grid` w-values."""
    s = Sampler(seed)
    zs = [s.rat() for _ in range(grid)]
    ws = [s.rat() for _ in range(grid)]
    out, h_order = [], H
    for z in zs:
        for w in ws:
            for _ in range(MAX_RESAMPLE):
                try:
                    lhs, rhs = fn(arg(z), arg(w))
                    break
                except PoleAtSample:
                    w = s.rat()
            else:
                raise PoleAtSample(f"{check_id}: no pole-free grid point")
            d = compare_ops(lhs, rhs)
            out.append({"point": [z, w], "verdict": "pass" if d is None else "fail"})
            if d is not None:
                h_order = min(h_order, d)
    verdict = "pass" if all(x["verdict"] == "pass" for x in out) else "fail"
    return CheckReport(check_id, params, verdict, h_order, out, seed, None)


CENTRAL = {"qdet_yangian": "T", "qdet_generalized": "L", "sdet_reflection": "B"}


def centrality_check(which: str, spec, H: int = 4, grid: int = 4, seed: int = 0, L: int = 2,
                     n: int | None = None) -> CheckReport:
    """The n = N traced series commutes with every generator entry: [S_[N](z) (x) 1, G(w)] = 0.

    Passing a smaller n gives a control that is expected to fail.
    """
    n = spec.N if n is None else n
    if which not in CENTRAL:
        raise UnsupportedKind(f"unknown centrality check {which!r}")
    if spec.family != "gl":
        raise UnsupportedFamily("centrality checks are stated for gl")
    params = _params(spec, H, which=which, L=L, n=n)
    if n + L > budget():
        return skipped(f"centrality-{which}", params, seed)
    fam = OpFamily(CENTRAL[which], _fixed_module(spec, L, seed), H)

    def fn(z, w):
        C = embed(fused_series(fam, n, z), 1 + L, range(1, 1 + L))
        return _commutator(C, fam.build(w)), TensorOp.zero(spec.N, 1 + L, H)

    return _pairs(f"centrality-{which}", params, seed, grid, H, fn)


def generator_commutator(spec, z, w, em: EvalModule, H: int, ij=(0, 0), kl=(0, 1)) -> TensorOp:
    """[t_ij(z)_W, t_kl(w)_W] as an operator on the module (0-based indices)."""
    def entry(T, i, j):
        N, L = spec.N, em.L
        q = N**L
        D = T.D
        out = {}
        for k, s in T.entries.items():
            r, c = divmod(k, D)
            a, qr = divmod(r, q)
            b, qc = divmod(c, q)
            if a == i and b == j:
                out[qr * q + qc] = s
        return TensorOp(N, L, H, out)

    A = entry(eval_T(em, z, H), *ij)
    B = entry(eval_T(em, w, H), *kl)
    return _commutator(A, B)


def negative_commutator_check(spec, H: int = 4, grid: int = 4, seed: int = 0, L: int = 1, order: int = 1
                              ) -> CheckReport:
    """Negative control: [t_11(z), t_12(w)] must be nonzero at h^order.

    The report passes when the h^order coefficient of the commutator is
    nonzero at every grid point; h_order records the lowest order at which
    the commutator was seen to be nonzero.
    """
    params = _params(spec, H, L=L, order=order)
    em = _fixed_module(spec, L, seed)
    zero = TensorOp.zero(spec.N, L, H)
    rep = _pairs("negative-generator-commutator", params, seed, grid, H,
                 lambda z, w: (generator_commutator(spec, z, w, em, H), zero))
    first = rep.h_order
    ok = all(s["verdict"] == "fail" for s in rep.samples) and first == order
    for s in rep.samples:
        s["verdict"] = "pass" if s["verdict"] == "fail" else "fail"
    rep.verdict = "pass" if ok else "fail"
    rep.note = f"commutator first nonzero at h^{first}"
    return rep


# --- reflection identities ---------------------------------------------------


def _refl_module(spec, pt: Sequence, L: int) -> EvalModule:
    return EvalModule(spec, tuple(pt[:L]))


def check_b_unitarity(spec, H: int = 6, samples: int = 5, seed: int = 0, L: int = 2) -> CheckReport:
    def fn(pt):
        em = _refl_module(spec, pt[1:], L)
        z = arg(pt[0])
        return compose(eval_B(em, z, H), eval_B(em, -z, H)), TensorOp.identity(spec.N, 1 + L, H)

    return run_sampled("reflection-unitarity", _params(spec, H, L=L), seed, samples, 1 + L, H, fn)


def check_reflection_equation(spec, H: int = 6, samples: int = 5, seed: int = 0, L: int = 2) -> CheckReport:
    """R(u-v) B1(u) R(u+v) B2(v) = B2(v) R(u+v) B1(u) R(u-v) with plain R."""
    n = 2 + L

    def fn(pt):
        u, v = arg(pt[0]), arg(pt[1])
        em = _refl_module(spec, pt[2:], L)
        R = lambda a: embed(r_single(spec, "plain", a, H), n, (0, 1))  # noqa: E731
        q = tuple(range(2, n))
        B1 = embed(eval_B(em, u, H), n, (0,) + q)
        B2 = embed(eval_B(em, v, H), n, (1,) + q)
        lhs = compose(compose(compose(R(u - v), B1), R(u + v)), B2)
        rhs = compose(compose(compose(B2, R(u + v)), B1), R(u - v))
        return lhs, rhs

    return run_sampled("reflection-equation", _params(spec, H, L=L), seed, samples, 2 + L, H, fn)


def check_generalized_reflection(spec, n: int, m: int, H: int = 6, samples: int = 5, seed: int = 0,
                                 L: int = 2) -> CheckReport:
    """R_nm(z1-z2) B_[n](u|z1) Rbar_nm(z1+z2) B_[m](v|z2) = reversed product, blocks on the same factors."""
    params = _params(spec, H, n=n, m=m, L=L)
    if n + m + L > budget():
        return skipped("reflection-generalized", params, seed)

    def fn(pt):
        z1, z2 = arg(pt[0]), arg(pt[1])
        u, v = pt[2:2 + n], pt[2 + n:2 + n + m]
        em = _refl_module(spec, pt[2 + n + m:], L)
        fam = OpFamily("B", em, H)
        st = make_word(u, v)
        A = n + m + L
        Bn = module_word(fam, st, [z1, z2], order=(0,))
        Bm = module_word(fam, st, [z1, z2], order=(1,))
        Rp = r_block(spec, "plain", n, m, u, v, z1 - z2, H=H, arity=A)
        Ru = r_block(spec, KIND, n, m, u, v, z1 + z2, underlined=True, H=H, arity=A)
        lhs = compose(compose(compose(Rp, Bn), Ru), Bm)
        rhs = compose(compose(compose(Bm, Ru), Bn), Rp)
        return lhs, rhs

    return run_sampled("reflection-generalized", params, seed, samples, 2 + n + m + L, H, fn)


def check_b_factorization(spec, n: int, m: int, H: int = 6, samples: int = 5, seed: int = 0,
                          L: int = 2) -> CheckReport:
    """B_[n+m](w|z) = B_[n](u|z) Rbar_nm(u|v|2z) B_[m](v|z), underlined block."""
    params = _params(spec, H, n=n, m=m, L=L)
    if n + m + L > budget():
        return skipped("reflection-factorization", params, seed)

    def fn(pt):
        z = arg(pt[0])
        u, v = pt[1:1 + n], pt[1 + n:1 + n + m]
        em = _refl_module(spec, pt[1 + n + m:], L)
        fam = OpFamily("B", em, H)
        A = n + m + L
        whole = module_word(fam, make_word(list(u) + list(v)), [z])
        st = make_word(u, v)
        Bn = module_word(fam, st, [z, z], order=(0,))
        Bm = module_word(fam, st, [z, z], order=(1,))
        Ru = r_block(spec, KIND, n, m, u, v, z + z, underlined=True, H=H, arity=A)
        return whole, compose(compose(Bn, Ru), Bm)

    return run_sampled("reflection-factorization", params, seed, samples, 1 + n + m + L, H, fn)


def check_rtt(spec, H: int = 4, samples: int = 5, seed: int = 0, L: int = 2, tag: str = "T") -> CheckReport:
    """R(u-v) G1(u) G2(v) = G2(v) G1(u) R(u-v) for G = T or L; polynomial R for L."""
    n = 2 + L

    def fn(pt):
        u, v = arg(pt[0]), arg(pt[1])
        fam = OpFamily(tag, EvalModule(spec, tuple(pt[2:2 + L])), H)
        kind = "polynomial" if tag == "L" else "plain"
        R = embed(r_single(spec, kind, u - v, H), n, (0, 1))
        q = tuple(range(2, n))
        G1 = embed(fam.build(u), n, (0,) + q)
        G2 = embed(fam.build(v), n, (1,) + q)
        return compose(compose(R, G1), G2), compose(compose(G2, G1), R)

    return run_sampled(f"rtt-{tag}", _params(spec, H, L=L), seed, samples, 2 + L, H, fn)


def check_crossing_relation(spec, H: int = 4, samples: int = 5, seed: int = 0, L: int = 2, tag: str = "T"
                            ) -> CheckReport:
    """G(u) G(u + h kappa)' = 1 for o and sp."""
    if spec.family == "gl":
        raise UnsupportedFamily("the crossing relation for generators needs o or sp")

    def fn(pt):
        u = arg(pt[0])
        fam = OpFamily(tag, EvalModule(spec, tuple(pt[1:1 + L])), H)
        G = fam.build(u)
        Gp = transpose(fam.build(u.shift(spec.kappa)), [0], "prime", spec)
        return compose(G, Gp), TensorOp.identity(spec.N, 1 + L, H)

    return run_sampled(f"crossing-{tag}", _params(spec, H, L=L), seed, samples, 1 + L, H, fn)
