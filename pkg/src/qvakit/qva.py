"""Braiding and intertwining maps on realized T+-words.

A word is a tuple of slots; each slot is a tuple of letters, and a letter
is an auxiliary factor position carrying a spectral argument. A slot with
letters (p1, s1), ..., (pk, sk) stands for T_{p1}(s1) ... T_{pk}(sk) applied
to the vacuum of its own copy of the vacuum module, and is realized on
quantum factors by an EvalModule.

Every map acts on a pair of slots by an explicit R-matrix formula. On a
realized word W that formula is a short program of operations
W -> X .S W (the product that is opposite on the auxiliary factors S);
S empty is left multiplication and S covering X is right multiplication.
Since the maps act on vacuum-module coefficients only, they commute with
these operations, so the program of a later map is applied to the
realized word before the programs of earlier maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmbeddingError, UnsupportedFamily
from .rmatrix import RArg, arg, block_factors, idempotent, r_inverse, r_single, staggered
from .scalar import ZERO, Rat, rat, series_mul
from .tensor import (
    _digits_table,
    TensorOp,
    compose,
    compose_twisted,
    embed,
    inverse,
    partial_trace,
    transpose,
)

KIND = "normalized"


# --- context and realizations ----------------------------------------------


@dataclass(frozen=True)
class LevelContext:
    spec: object
    c: Rat
    use_critical: bool = False
    H: int = 4

    @classmethod
    def critical(cls, spec, H: int = 4) -> "LevelContext":
        return cls(spec, spec.c_crit, True, H)

    @classmethod
    def at_level(cls, spec, c, H: int = 4) -> "LevelContext":
        c = rat(c)
        return cls(spec, c, c == spec.c_crit, H)

    @property
    def level_shift(self) -> Rat:
        """Coefficient of h in h*epsilon*c."""
        return self.spec.epsilon * self.c

    def require_critical_gl(self) -> None:
        if self.spec.family != "gl":
            raise UnsupportedFamily("mu, nu and gamma are defined for gl only")
        if not self.use_critical:
            raise UnsupportedFamily("mu, nu and gamma are defined at the critical level only")


@dataclass(frozen=True)
class EvalModule:
    """Generic RTT solution T_p(w) = prod_k Rbar_{p,q_k}(w - a_k)."""

    spec: object
    points: tuple

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise EmbeddingError("evaluation points must be pairwise distinct")

    @property
    def L(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Letter:
    pos: int
    arg: RArg


def make_word(*slot_args: Sequence) -> tuple:
    """Slots from lists of spectral arguments; auxiliary positions run 0, 1, 2, ..."""
    out, p = [], 0
    for args in slot_args:
        slot = []
        for a in args:
            slot.append(Letter(p, a if isinstance(a, RArg) else arg(a)))
            p += 1
        out.append(tuple(slot))
    return tuple(out)


def aux_count(struct: tuple) -> int:
    return sum(len(s) for s in struct)


def slot_positions(slot: tuple) -> frozenset:
    return frozenset(l.pos for l in slot)


def t_factor(spec, w: RArg, em: EvalModule, p: int, qs: Sequence[int], arity: int, H: int) -> TensorOp:
    out = TensorOp.identity(spec.N, arity, H)
    for a, q in zip(em.points, qs):
        out = compose(out, embed(r_single(spec, KIND, w - a, H), arity, (p, q)))
    return out


def realize(spec, struct: tuple, modules: Sequence[EvalModule], H: int) -> TensorOp:
    """Operator for the word: auxiliary factors first, then each slot's quantum factors."""
    if len(modules) != len(struct):
        raise EmbeddingError(f"{len(struct)} slots but {len(modules)} modules")
    A = aux_count(struct)
    arity = A + sum(em.L for em in modules)
    out = TensorOp.identity(spec.N, arity, H)
    q0 = A
    for slot, em in zip(struct, modules):
        qs = list(range(q0, q0 + em.L))
        for l in slot:
            out = compose(out, t_factor(spec, l.arg, em, l.pos, qs, arity, H))
        q0 += em.L
    return out


# --- programs ---------------------------------------------------------------


@dataclass(frozen=True)
class Op:
    """W -> X .S W with X acting on auxiliary factors only."""

    X: TensorOp
    S: frozenset

    def inverse(self) -> "Op":
        # X* .S X = 1 in the algebra that is opposite on S
        s = sorted(self.S)
        return Op(transpose(inverse(transpose(self.X, s)), s), self.S)


def left(X: TensorOp) -> Op:
    return Op(X, frozenset())


def right(X: TensorOp) -> Op:
    return Op(X, frozenset(range(X.arity)))


def apply_ops(W: TensorOp, ops: Sequence[Op]) -> TensorOp:
    for op in ops:
        A = op.X.arity
        X = op.X if A == W.arity else embed(op.X, W.arity, range(A))
        if not op.S:
            W = compose(X, W)
        elif len(op.S) == A:
            # opposite on every factor X touches: plain right multiplication
            W = compose(W, X)
        else:
            W = compose_twisted(X, W, op.S)
    return W


def invert_ops(ops: Sequence[Op]) -> list:
    return [op.inverse() for op in reversed(ops)]


def adjoint_ops(K: TensorOp, ops: Sequence[Op]) -> TensorOp:
    """K' with tr(K . P(W)) = tr(K' . W) over the auxiliary factors."""
    for op in reversed(ops):
        s = sorted(op.S)
        K = transpose(compose(transpose(K, s), transpose(op.X, s)), s)
    return K


def block(ctx: LevelContext, struct: tuple, a: int, b: int, z: RArg, under: bool = False, inv: bool = False,
          orient: tuple = (False, False)) -> TensorOp:
    """R-block between slots a (first) and b (second) at spectral shift z, on all auxiliary factors."""

    spec, H = ctx.spec, ctx.H
    A = aux_count(struct)
    sa, sb = struct[a], struct[b]
    pairs = block_factors(len(sa), len(sb), orient, under)
    if inv:
        pairs = pairs[::-1]
    out = TensorOp.identity(spec.N, A, H)
    for i, j in pairs:
        la, lb = sa[i], sb[j]
        w = z + la.arg + lb.arg if under else z + la.arg - lb.arg
        r = r_inverse(spec, KIND, w, H) if inv else r_single(spec, KIND, w, H)
        out = compose(out, embed(r, A, (la.pos, lb.pos)))
    return out


@dataclass(frozen=True)
class MapCall:
    """One map applied to the slot pair `slots` (first, second).

    name is one of sigma, rho, gamma, gamma_inv, mu, nu, S, Yrho, Ynu,
    identity; inverse=True applies the inverse map.
    """

    name: str
    slots: tuple
    z: RArg
    x: RArg | None = None
    inverse: bool = False


def call(name: str, slots: tuple, z, x=None, inverse: bool = False) -> MapCall:
    z = z if isinstance(z, RArg) else arg(z)
    if x is not None and not isinstance(x, RArg):
        x = arg(x)
    return MapCall(name, tuple(slots), z, x, inverse)


def _two_x(c: MapCall) -> RArg:
    return c.x + c.x + c.z


def program(ctx: LevelContext, c: MapCall, struct: tuple) -> tuple:
    """(ops, new_struct) for one map call on the given word structure."""
    a, b = c.slots
    z = c.z
    spec = ctx.spec
    Sa, Sb = slot_positions(struct[a]), slot_positions(struct[b])
    N = spec.N
    blk = lambda zz, **kw: block(ctx, struct, a, b, zz, **kw)  # noqa: E731
    if c.name in ("Yrho", "Ynu"):
        if c.inverse:
            raise EmbeddingError("vertex maps have no inverse")
        ops = []
        if c.name == "Ynu":
            ctx.require_critical_gl()
            ops = [Op(blk(_two_x(c).shift(-N), under=True, inv=True), Sa)]
        merged = tuple(Letter(l.pos, l.arg + z) for l in struct[a]) + struct[b]
        lo = min(a, b)
        rest = [s for k, s in enumerate(struct) if k not in (a, b)]
        new = tuple(rest[:lo] + [merged] + rest[lo:])
        return ops, new
    if c.name == "identity":
        ops = []
    elif c.name == "sigma":
        ops = [left(blk(z)), right(blk(z, inv=True))]
    elif c.name == "rho":
        ops = [Op(blk(z.shift(ctx.level_shift), inv=True), Sa), right(blk(z))]
    elif c.name in ("gamma", "gamma_inv"):
        ctx.require_critical_gl()
        gam = c.name == "gamma"
        if gam != c.inverse:
            ops = [Op(blk(_two_x(c).shift(-N), under=True, inv=True), Sa)]
        else:
            ops = [Op(blk(_two_x(c), under=True), Sa)]
        return ops, struct
    elif c.name == "mu":
        ctx.require_critical_gl()
        ops = [
            Op(blk(_two_x(c), under=True), Sa),
            left(blk(z)),
            right(blk(z, inv=True)),
            Op(blk(_two_x(c).shift(-N), under=True, inv=True), Sb),
        ]
    elif c.name == "nu":
        ctx.require_critical_gl()
        ops = [
            Op(blk(z.shift(-N), inv=True), Sa),
            right(blk(z)),
            Op(blk(_two_x(c).shift(-N), under=True, inv=True), Sa),
        ]
    elif c.name == "S":
        # S(z) = rho(z) sigma(z) rho_21(-z)^{-1}; inner-most map's ops come first
        parts = [call("rho", (a, b), z), call("sigma", (a, b), z), call("rho", (b, a), -z, inverse=True)]
        ops = []
        for p in parts:
            ops += program(ctx, p, struct)[0]
    else:
        raise EmbeddingError(f"unknown map {c.name!r}")
    if c.inverse:
        ops = invert_ops(ops)
    return ops, struct


def compile_calls(ctx: LevelContext, struct: tuple, calls: Sequence[MapCall]) -> tuple:
    """Ops to apply to the realized final word, and that final structure."""
    chain = []
    for c in calls:
        ops, struct = program(ctx, c, struct)
        chain.append(ops)
    flat = []
    for ops in reversed(chain):
        flat += ops
    return flat, struct


# --- symbols ----------------------------------------------------------------


@dataclass
class SymbolExpr:
    """A realized word together with the maps applied to it so far.

    `pre` holds ops describing a non-canonical input expression in terms of
    the canonical word (empty for the canonical word itself).
    """

    ctx: LevelContext
    struct: tuple
    modules: tuple
    calls: tuple = ()
    pre: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def then(self, c: MapCall, modules: Sequence[EvalModule] | None = None) -> "SymbolExpr":
        return SymbolExpr(self.ctx, self.struct, tuple(modules) if modules else self.modules,
                          self.calls + (c,), self.pre)

    def final_struct(self) -> tuple:
        return compile_calls(self.ctx, self.struct, self.calls)[1]

    @property
    def realization(self) -> TensorOp:
        if "r" not in self._cache:
            ops, fin = compile_calls(self.ctx, self.struct, self.calls)
            mods = self.modules
            if len(mods) != len(fin):
                mods = mods[: len(fin)]
            W = realize(self.ctx.spec, fin, mods, self.ctx.H)
            self._cache["r"] = apply_ops(W, list(ops) + list(self.pre))
        return self._cache["r"]


def realize_symbol(ctx: LevelContext, em1: EvalModule, em2: EvalModule, n: int, m: int, u, v) -> SymbolExpr:
    struct = make_word(list(u)[:n], list(v)[:m])
    return SymbolExpr(ctx, struct, (em1, em2))


def sigma_apply(s: SymbolExpr, z, slots=(0, 1)) -> SymbolExpr:
    return s.then(call("sigma", slots, z))


def rho_apply(s: SymbolExpr, z, slots=(0, 1)) -> SymbolExpr:
    return s.then(call("rho", slots, z))


def gamma_apply(s: SymbolExpr, z, x, inverse: bool = False, slots=(0, 1)) -> SymbolExpr:
    return s.then(call("gamma_inv" if inverse else "gamma", slots, z, x))


def mu_apply(s: SymbolExpr, z, x, slots=(0, 1)) -> SymbolExpr:
    return s.then(call("mu", slots, z, x))


def nu_apply(s: SymbolExpr, z, x, slots=(0, 1)) -> SymbolExpr:
    return s.then(call("nu", slots, z, x))


def S_apply(s: SymbolExpr, z, slots=(0, 1)) -> SymbolExpr:
    return s.then(call("S", slots, z))


def vertex_apply(s: SymbolExpr, z, mode: str = "rho", x=None, slots=(0, 1)) -> TensorOp:
    """Merged one-slot realization; the merged slot uses the first slot's module."""
    name = {"rho": "Yrho", "nu": "Ynu"}[mode]
    if mode == "nu" and x is None:
        raise EmbeddingError("Y^nu needs an x value")
    c = call(name, slots, z, x)
    fin = program(s.ctx, c, s.final_struct())[1]
    a, b = slots
    mods = [m for k, m in enumerate(s.modules) if k != max(a, b)]
    if len(mods) != len(fin):
        mods = mods[: len(fin)]
    return SymbolExpr(s.ctx, s.struct, tuple(mods), s.calls + (c,), s.pre).realization


# --- traced symbols ---------------------------------------------------------


def staggered_args(spec, n: int, u0) -> list:
    return staggered(spec, n, u0)


def trace_symbol(ctx: LevelContext, n: int, u0, em: EvalModule) -> TensorOp:
    """The realized central series tr E_[n] T_[n](u_[n]) on the quantum factors."""
    spec, H = ctx.spec, ctx.H
    struct = make_word(staggered_args(spec, n, u0))
    W = realize(spec, struct, [em], H)
    E = embed(idempotent(spec, n, H), W.arity, range(n))
    return partial_trace(compose(E, W), range(n))


def traced_image(ctx: LevelContext, struct: tuple, modules: Sequence[EvalModule], traced: Sequence[int],
                 calls: Sequence[MapCall]) -> TensorOp:
    """tr over the traced slots of E . Phi(word), computed directly.

    `traced` lists slot indices carrying an idempotent E_[len(slot)] and a trace.
    """
    spec, H = ctx.spec, ctx.H
    s = SymbolExpr(ctx, struct, tuple(modules), tuple(calls))
    Z = s.realization
    positions = []
    for k in traced:
        pos = [l.pos for l in struct[k]]
        E = embed(idempotent(spec, len(pos), H), Z.arity, pos)
        Z = compose(E, Z)
        positions += pos
    return partial_trace(Z, positions)


def _slot_blocks(spec, slot: tuple, em: EvalModule, H: int) -> TensorOp:
    """A single slot realized on its own auxiliary factors followed by its quantum factors."""
    local = tuple(Letter(k, l.arg) for k, l in enumerate(slot))
    return realize(spec, (local,), [em], H)


def traced_image_fast(ctx: LevelContext, struct: tuple, modules: Sequence[EvalModule],
                      calls: Sequence[MapCall]) -> TensorOp:
    """Same as traced_image with every slot traced, via the adjoint of the program.

    tr(E . P(W)) = tr(P*(E) . W) and W factorizes over the two slots, so only
    operators on the auxiliary factors and on one slot's factors are formed.
    """
    spec, H = ctx.spec, ctx.H
    if len(struct) != 2:
        raise EmbeddingError("fast traced path handles two slots")
    ops, fin = compile_calls(ctx, struct, calls)
    if fin != struct:
        raise EmbeddingError("fast traced path needs maps that keep the word structure")
    A = aux_count(struct)
    E = TensorOp.identity(spec.N, A, H)
    for slot in struct:
        pos = [l.pos for l in slot]
        E = compose(E, embed(idempotent(spec, len(pos), H), A, pos))
    K = adjoint_ops(E, ops)
    return contract_two_slots(spec, struct, modules, K, H)


def contract_two_slots(spec, struct: tuple, modules: Sequence[EvalModule], K: TensorOp, H: int) -> TensorOp:
    """tr_aux(K . W) for W = W_a (x) W_b, never forming W itself."""
    sa, sb = struct
    na, nb = len(sa), len(sb)
    N = spec.N
    Wa = _slot_blocks(spec, sa, modules[0], H)
    Wb = _slot_blocks(spec, sb, modules[1], H)
    La, Lb = modules[0].L, modules[1].L
    qa, qb = N**La, N**Lb
    # split W_a into blocks indexed by its auxiliary (row, col)
    def blocks(Wx, n, q):
        Dx = Wx.D
        out: dict = {}
        for k, s in Wx.entries.items():
            r, c = divmod(k, Dx)
            ar, qr = divmod(r, q)
            ac, qc = divmod(c, q)
            out.setdefault((ar, ac), {})[qr * q + qc] = s
        return out

    Ba, Bb = blocks(Wa, na, qa), blocks(Wb, nb, qb)
    # K lives on aux positions in `struct` order; map to (a-index, b-index)
    A = na + nb
    digs = _digits_table(N, A)
    pa = [l.pos for l in sa]
    pb = [l.pos for l in sb]
    wa = [N ** (na - 1 - k) for k in range(na)]
    wb = [N ** (nb - 1 - k) for k in range(nb)]
    D = K.D
    zero = (ZERO,) * H
    # C[(beta_a, alpha_a)] = sum K[alpha, beta] B_b[beta_b, alpha_b]
    C: dict = {}
    for k, s in K.entries.items():
        r, c = divmod(k, D)
        rd, cd = digs[r], digs[c]
        al_a = sum(rd[p] * w for p, w in zip(pa, wa))
        al_b = sum(rd[p] * w for p, w in zip(pb, wb))
        be_a = sum(cd[p] * w for p, w in zip(pa, wa))
        be_b = sum(cd[p] * w for p, w in zip(pb, wb))
        blk = Bb.get((be_b, al_b))
        if not blk:
            continue
        acc = C.setdefault((be_a, al_a), {})
        for qk, t in blk.items():
            v = series_mul(s, t)
            acc[qk] = tuple(x + y for x, y in zip(acc.get(qk, zero), v))
    out: dict = {}
    Dq = qa * qb
    for key, cb in C.items():
        ba = Ba.get(key)
        if not ba:
            continue
        for ka, s in ba.items():
            ra, ca = divmod(ka, qa)
            for kb, t in cb.items():
                rb, cbb = divmod(kb, qb)
                v = series_mul(s, t)
                kk = (ra * qb + rb) * Dq + ca * qb + cbb
                out[kk] = tuple(x + y for x, y in zip(out.get(kk, zero), v))
    return TensorOp(N, La + Lb, H, {k: v for k, v in out.items() if any(v)})
