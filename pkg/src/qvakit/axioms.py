"""Sampled checks of the braiding-map axioms on realized words."""

from __future__ import annotations

from typing import Sequence

from .config import budget
from .errors import DegreeBoundExceeded, EmbeddingError, PoleAtSample, UnsupportedKind, UnsupportedN
from .qva import (
    EvalModule,
    LevelContext,
    Op,
    SymbolExpr,
    apply_ops,
    block,
    call,
    left,
    make_word,
    program,
    realize,
    right,
    slot_positions,
    traced_image,
    traced_image_fast,
)
from .report import MAX_RESAMPLE, CheckReport, Sampler, run_sampled, skipped
from .rmatrix import arg, max_fusion, staggered
from .scalar import pole_free_at, reconstruct_rational


def _ctx(spec, H: int, level=None) -> LevelContext:
    if level is None:
        return LevelContext.critical(spec, H)
    return LevelContext.at_level(spec, level, H)


class _Draw:
    """Consumes a sample point left to right."""

    def __init__(self, pt: Sequence):
        self.pt = list(pt)
        self.k = 0

    def take(self, n: int) -> list:
        out = self.pt[self.k:self.k + n]
        self.k += n
        return out

    def one(self):
        return self.take(1)[0]

    def modules(self, spec, count: int, L: int) -> list:
        return [EvalModule(spec, tuple(self.take(L))) for _ in range(count)]


def _params(spec, H: int, **kw) -> dict:
    d = {"spec": spec.label, "H": H}
    d.update(kw)
    return d


def _ev(ctx, struct, modules, calls, pre=()) -> object:
    return SymbolExpr(ctx, struct, tuple(modules), tuple(calls), tuple(pre)).realization


def _size(spec, lengths: Sequence[int], L: int) -> int:
    return sum(lengths) + L * len(lengths)


# --- braiding axioms ----------------------------------------------------------


def check_map_qybe(spec, name: str = "sigma", H: int = 4, samples: int = 5, seed: int = 0,
                   lengths: Sequence[int] = (1, 1, 1), L: int = 1) -> CheckReport:
    """map12(z1, x+z2) map13(z1+z2, x) map23(z2, x) = map23 map13 map12 on three words."""
    params = _params(spec, H, map=name, lengths=list(lengths), L=L)
    if _size(spec, lengths, L) > budget():
        return skipped(f"braiding-qybe-{name}", params, seed)
    if name not in ("sigma", "mu", "S"):
        raise UnsupportedKind(f"no map-level QYBE check for {name!r}")
    ctx = _ctx(spec, H) if name == "mu" else None

    def fn(pt):
        d = _Draw(pt)
        words = [d.take(k) for k in lengths]
        z1, z2, x = (arg(v) for v in d.take(3))
        c = ctx or _ctx(spec, H, d.one())
        mods = d.modules(spec, 3, L)
        st = make_word(*words)
        xs = (lambda a: a) if name == "mu" else (lambda a: None)  # noqa: E731
        c12 = call(name, (0, 1), z1, xs(x + z2))
        c13 = call(name, (0, 2), z1 + z2, xs(x))
        c23 = call(name, (1, 2), z2, xs(x))
        return _ev(c, st, mods, [c23, c13, c12]), _ev(c, st, mods, [c12, c13, c23])

    nv = sum(lengths) + 4 + 3 * L
    return run_sampled(f"braiding-qybe-{name}", params, seed, samples, nv, H, fn)


def check_map_unitarity(spec, name: str = "sigma", H: int = 4, samples: int = 5, seed: int = 0,
                        lengths: Sequence[int] = (1, 1), L: int = 1) -> CheckReport:
    """map(-z, x) map21(z, x - z) = id; for S the level is sampled."""
    params = _params(spec, H, map=name, lengths=list(lengths), L=L)
    if _size(spec, lengths, L) > budget():
        return skipped(f"braiding-unitarity-{name}", params, seed)

    def fn(pt):
        d = _Draw(pt)
        st = make_word(*(d.take(k) for k in lengths))
        z, x = arg(d.one()), arg(d.one())
        c = _ctx(spec, H) if name == "mu" else _ctx(spec, H, d.one())
        mods = d.modules(spec, 2, L)
        xs = (lambda a: a) if name == "mu" else (lambda a: None)  # noqa: E731
        lhs = _ev(c, st, mods, [call(name, (1, 0), z, xs(x - z)), call(name, (0, 1), -z, xs(x))])
        return lhs, _ev(c, st, mods, [])

    nv = sum(lengths) + 3 + 2 * L
    return run_sampled(f"braiding-unitarity-{name}", params, seed, samples, nv, H, fn)


def _singular_ops(ctx, st, variant: str, t, x) -> list:
    """Program of mu(-x + t, x), or of a control map with a block at x + z."""
    z = arg(t) - x
    if variant == "mu":
        return program(ctx, call("mu", (0, 1), z, x), st)[0]
    if variant == "control":
        return [Op(block(ctx, st, 0, 1, x + z, under=True), slot_positions(st[0]))]
    raise UnsupportedKind(f"unknown singularity variant {variant!r}")


def check_singularity(spec, variant: str = "mu", H: int = 4, samples: int = 3, seed: int = 0, n: int = 1,
                      m: int = 1, L: int = 1) -> CheckReport:
    """mu(-x + t, x) on the canonical word has no pole at t = 0, order by order in h.

    x and the module points are sampled; the letters sit at the staggered
    tuples based at 0, since they are formal variables expanded there.
    Every matrix entry of every h-order is reconstructed as a rational
    function of t and its denominator is evaluated at t = 0.
    """
    params = _params(spec, H, variant=variant, n=n, m=m, L=L)
    cid = f"braiding-singularity-{variant}"
    if n + m + 2 * L > budget():
        return skipped(cid, params, seed)
    ctx = _ctx(spec, H)
    forms = 2 * n * m
    deg = forms * max(H - 1, 0)
    npts = 2 * deg + 3
    sampler = Sampler(seed)
    st = make_word(staggered(spec, n, 0), staggered(spec, m, 0))
    out, h_order = [], H
    for _ in range(samples):
        for _attempt in range(MAX_RESAMPLE):
            x = arg(sampler.rat())
            pts = [sampler.rat() for _ in range(2 * L)]
            try:
                mods = [EvalModule(spec, tuple(pts[:L])), EvalModule(spec, tuple(pts[L:]))]
                W = realize(spec, st, mods, H)
            except (PoleAtSample, EmbeddingError):
                continue
            break
        else:
            raise PoleAtSample(f"{cid}: no pole-free sample")
        values, ts = [], []
        while len(ts) < npts:
            t = sampler.rat()
            if t in ts:
                continue
            try:
                values.append(apply_ops(W, _singular_ops(ctx, st, variant, t, x)))
            except PoleAtSample:
                continue
            ts.append(t)
        keys = set()
        for v in values:
            keys.update(v.entries)
        first_bad = None
        for k in range(H):
            bound = forms * k
            for key in sorted(keys):
                data = [(t, v.entries.get(key, (0,) * H)[k]) for t, v in zip(ts, values)]
                try:
                    g = reconstruct_rational(data, bound, bound)
                except DegreeBoundExceeded:
                    first_bad = k
                    break
                if not pole_free_at(g, 0):
                    first_bad = k
                    break
            if first_bad is not None:
                break
        out.append({"point": [x.base] + pts, "verdict": "pass" if first_bad is None else "fail"})
        if first_bad is not None:
            h_order = min(h_order, first_bad)
    verdict = "pass" if all(s["verdict"] == "pass" for s in out) else "fail"
    return CheckReport(cid, params, verdict, h_order, out, seed, None)


# --- compatibility, equivalence and the EK identity -------------------------


PAIRS = {"mu-nu": ("mu", "nu"), "sigma-rho": ("sigma", "rho"), "sigma-iota": ("sigma", "identity")}


def check_compatibility(spec, pair: str = "mu-nu", H: int = 4, samples: int = 5, seed: int = 0,
                        lengths: Sequence[int] = (1, 1), L: int = 1) -> CheckReport:
    """S(z) nu21(-z, x+z) = nu(z, x) mu(z, x).

    sigma-iota pairs sigma with the trivial embedding, the compatible
    partner of S rather than of sigma: a negative control.
    """
    if pair not in PAIRS:
        raise UnsupportedKind(f"unknown pair {pair!r}")
    mu, nu = PAIRS[pair]
    params = _params(spec, H, pair=pair, lengths=list(lengths), L=L)
    if _size(spec, lengths, L) > budget():
        return skipped(f"compatibility-{pair}", params, seed)

    def fn(pt):
        d = _Draw(pt)
        st = make_word(*(d.take(k) for k in lengths))
        z, x = arg(d.one()), arg(d.one())
        lvl = d.one()
        c = _ctx(spec, H) if pair == "mu-nu" else _ctx(spec, H, lvl)
        mods = d.modules(spec, 2, L)
        xs = (lambda a: a) if pair == "mu-nu" else (lambda a: None)  # noqa: E731
        lhs = _ev(c, st, mods, [call(nu, (1, 0), -z, xs(x + z)), call("S", (0, 1), z)])
        rhs = _ev(c, st, mods, [call(mu, (0, 1), z, xs(x)), call(nu, (0, 1), z, xs(x))])
        return lhs, rhs

    nv = sum(lengths) + 3 + 2 * L
    return run_sampled(f"compatibility-{pair}", params, seed, samples, nv, H, fn)


def check_ek_identity(spec, H: int = 4, samples: int = 5, seed: int = 0, lengths: Sequence[int] = (1, 1),
                      L: int = 1) -> CheckReport:
    """S(z)(T24 Rbar(z - h eps c) T13 Rbar(z)^{-1}) = Rbar(z) T13 Rbar(z + h eps c)^{-1} T24."""
    params = _params(spec, H, lengths=list(lengths), L=L)
    if _size(spec, lengths, L) > budget():
        return skipped("ek-identity", params, seed)

    def fn(pt):
        d = _Draw(pt)
        st = make_word(*(d.take(k) for k in lengths))
        z = arg(d.one())
        c = _ctx(spec, H, d.one())
        mods = d.modules(spec, 2, L)
        sa, sb = slot_positions(st[0]), slot_positions(st[1])
        shift = c.level_shift
        # T24 X T13 is X taken opposite on the second word's factors
        pre_in = [Op(block(c, st, 0, 1, z.shift(-shift)), sb), right(block(c, st, 0, 1, z, inv=True))]
        lhs = _ev(c, st, mods, [call("S", (0, 1), z)], pre_in)
        pre_out = [Op(block(c, st, 0, 1, z.shift(shift), inv=True), sa), left(block(c, st, 0, 1, z))]
        return lhs, _ev(c, st, mods, [], pre_out)

    nv = sum(lengths) + 2 + 2 * L
    return run_sampled("ek-identity", params, seed, samples, nv, H, fn)


EQUIVALENCES = ("mu", "nu", "gamma-shift", "gamma-inverse", "mu-forms", "ynu", "rho-sigma-ek")


def check_equivalence(spec, which: str = "mu", H: int = 4, samples: int = 5, seed: int = 0,
                      lengths: Sequence[int] = (1, 1), L: int = 1) -> CheckReport:
    """Identities tying the maps together, evaluated on the canonical word.

    mu: mu = gamma^{-1} sigma gamma21.  nu: nu = rho gamma.
    gamma-shift: gamma(z, x) = gamma(-z, x + z).  gamma-inverse: gamma gamma^{-1} = 1.
    mu-forms: the second stated form of mu, with the input rewritten.
    ynu: Y^nu = Y^rho rho^{-1} nu at level critical.
    rho-sigma-ek: rho(z) sigma(z) maps the canonical word to the EK right-hand side.
    """
    if which not in EQUIVALENCES:
        raise UnsupportedKind(f"unknown equivalence {which!r}")
    params = _params(spec, H, which=which, lengths=list(lengths), L=L)
    if _size(spec, lengths, L) > budget():
        return skipped(f"equivalence-{which}", params, seed)

    def fn(pt):
        d = _Draw(pt)
        st = make_word(*(d.take(k) for k in lengths))
        z, x = arg(d.one()), arg(d.one())
        lvl = d.one()
        c = _ctx(spec, H) if which != "rho-sigma-ek" else _ctx(spec, H, lvl)
        mods = d.modules(spec, 2, L)
        ev = lambda calls, pre=(): _ev(c, st, mods, calls, pre)  # noqa: E731
        if which == "mu":
            return ev([call("mu", (0, 1), z, x)]), ev(
                [call("gamma", (1, 0), z, x), call("sigma", (0, 1), z), call("gamma_inv", (0, 1), z, x)])
        if which == "nu":
            return ev([call("nu", (0, 1), z, x)]), ev([call("gamma", (0, 1), z, x), call("rho", (0, 1), z)])
        if which == "gamma-shift":
            return ev([call("gamma", (0, 1), z, x)]), ev([call("gamma", (0, 1), -z, x + z)])
        if which == "gamma-inverse":
            return ev([call("gamma_inv", (0, 1), z, x), call("gamma", (0, 1), z, x)]), ev([])
        if which == "mu-forms":
            # mu(T24 Rbar_(2x+z) T13 Rbar(z)) = Rbar(z) T13 Rbar_(2x+z) T24
            sa, sb = slot_positions(st[0]), slot_positions(st[1])
            two_x = x + x + z
            pre_in = [Op(block(c, st, 0, 1, two_x, under=True), sb), right(block(c, st, 0, 1, z))]
            pre_out = [Op(block(c, st, 0, 1, two_x, under=True), sa), left(block(c, st, 0, 1, z))]
            return ev([call("mu", (0, 1), z, x)], pre_in), ev([], pre_out)
        if which == "ynu":
            direct = SymbolExpr(c, st, (mods[0],), (call("Ynu", (0, 1), z, x),)).realization
            via = SymbolExpr(c, st, (mods[0],), (call("nu", (0, 1), z, x), call("rho", (0, 1), z, inverse=True),
                                                 call("Yrho", (0, 1), z))).realization
            return direct, via
        # rho(z) sigma(z) on the canonical word is Rbar(z) T13 Rbar(z + h eps c)^{-1} T24
        sa = slot_positions(st[0])
        pre_out = [Op(block(c, st, 0, 1, z.shift(c.level_shift), inv=True), sa), left(block(c, st, 0, 1, z))]
        return ev([call("sigma", (0, 1), z), call("rho", (0, 1), z)]), ev([], pre_out)

    nv = sum(lengths) + 3 + 2 * L
    return run_sampled(f"equivalence-{which}", params, seed, samples, nv, H, fn)


# --- hexagons -----------------------------------------------------------------


HEXAGONS = ("rho", "sigma", "gamma")


def check_hexagon(spec, which: str = "rho", H: int = 3, samples: int = 5, seed: int = 0,
                  lengths: Sequence[int] = (1, 1, 1), L: int = 1) -> CheckReport:
    """phi(z1)(Y^rho(z2) (x) 1) = (Y^rho(z2) (x) 1) phi13 phi23 in the order of each relation."""
    if which not in HEXAGONS:
        raise UnsupportedKind(f"unknown hexagon {which!r}")
    params = _params(spec, H, which=which, lengths=list(lengths), L=L)
    if sum(lengths) + 2 * L > budget():
        return skipped(f"hexagon-{which}", params, seed)

    def fn(pt):
        d = _Draw(pt)
        st = make_word(*(d.take(k) for k in lengths))
        z1, z2, x = (arg(v) for v in d.take(3))
        lvl = d.one()
        c = _ctx(spec, H) if which == "gamma" else _ctx(spec, H, lvl)
        mods = d.modules(spec, 2, L)
        xs = (lambda a: a) if which == "gamma" else (lambda a: None)  # noqa: E731
        z12 = z1 + z2
        lhs_calls = [call("Yrho", (0, 1), z2), call(which, (0, 1), z1, xs(x))]
        p13, p23 = call(which, (0, 2), z12, xs(x)), call(which, (1, 2), z1, xs(x))
        inner = [p13, p23] if which == "sigma" else [p23, p13]
        rhs_calls = inner + [call("Yrho", (0, 1), z2)]
        ev = lambda calls: SymbolExpr(c, st, mods, tuple(calls)).realization  # noqa: E731
        return ev(lhs_calls), ev(rhs_calls)

    nv = sum(lengths) + 4 + 2 * L
    return run_sampled(f"hexagon-{which}", params, seed, samples, nv, H, fn)


# --- fixed points -------------------------------------------------------------


def check_fixed_point(spec, name: str = "sigma", n: int = 1, m: int = 1, H: int = 4, samples: int = 5,
                      seed: int = 0, form: str = "traced", L: int = 1, level=None) -> CheckReport:
    """A map fixes realized traced symbols at the critical level.

    form "traced": both words are fused and traced, tr E T+_[n](u_[n]) (x) tr E T+_[m](v_[m]).
    form "w": the first word is an arbitrary n-letter word and the second
    is the traced symbol of length m. Traced images are computed through
    the adjoint of the map's program and, when the operators fit the
    budget, again by direct realization; both must agree.
    """
    params = _params(spec, H, map=name, n=n, m=m, form=form, L=L)
    if level is not None:
        params["level"] = level
    cid = f"fixed-point-{name}-{form}"
    mmax = max_fusion(spec)
    if m > mmax or (form == "traced" and n > mmax):
        raise UnsupportedN(f"fusion length outside 1..{mmax} for {spec.label}")
    direct_fits = n + m + 2 * L <= budget()
    if form == "w" and not direct_fits:
        return skipped(cid, params, seed)

    def fn(pt):
        d = _Draw(pt)
        c = _ctx(spec, H, level)
        z, x = arg(d.one()), arg(d.one())
        u0, v0 = d.one(), d.one()
        w = d.take(n)
        mods = d.modules(spec, 2, L)
        first = staggered(spec, n, u0) if form == "traced" else w
        st = make_word(first, staggered(spec, m, v0))
        calls = [call(name, (0, 1), z, x if name == "mu" else None)]
        if form == "w":
            return traced_image(c, st, mods, [1], calls), traced_image(c, st, mods, [1], [])
        fast = traced_image_fast(c, st, mods, calls)
        base = traced_image_fast(c, st, mods, [])
        if not direct_fits:
            return fast, base
        return [fast, traced_image(c, st, mods, [0, 1], calls)], [base, fast]

    nv = 4 + n + 2 * L
    return run_sampled(cid, params, seed, samples, nv, H, fn)


# --- dispatcher ---------------------------------------------------------------


CHECKS = {
    "braiding-qybe": check_map_qybe,
    "braiding-unitarity": check_map_unitarity,
    "braiding-singularity": check_singularity,
    "compatibility": check_compatibility,
    "ek-identity": check_ek_identity,
    "equivalence": check_equivalence,
    "hexagon": check_hexagon,
    "fixed-point": check_fixed_point,
}


def run_axiom_checks(check_id: str, params: dict) -> CheckReport:
    """Run one named check; params carry spec plus the keyword arguments of that check."""
    if check_id not in CHECKS:
        raise UnsupportedKind(f"unknown axiom check {check_id!r}")
    kw = dict(params)
    spec = kw.pop("spec")
    return CHECKS[check_id](spec, **kw)
