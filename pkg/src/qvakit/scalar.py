"""Exact scalars: rationals, truncated h-series, the normalizing series f,
and univariate rational reconstruction."""

from __future__ import annotations

from typing import Iterable, Sequence

import gmpy2

from .errors import (
    DegreeBoundExceeded,
    InternalConsistency,
    NonInvertible,
    OrderMismatch,
    ParseError,
    PoleAtSample,
    TruncationDepth,
)

Rat = gmpy2.mpq
ZERO = Rat(0)
ONE = Rat(1)


def rat(x) -> Rat:
    """Coerce ints, strings like "p/q", Fractions and mpq values to Rat."""
    if isinstance(x, str):
        try:
            return Rat(x.strip())
        except ValueError as exc:
            raise ParseError(f"not a rational: {x!r}") from exc
    return Rat(x)


def rat_str(x: Rat) -> str:
    x = Rat(x)
    return f"{x.numerator}/{x.denominator}"


# --- truncated series in h -------------------------------------------------


class HSeries:
    """Power series in h truncated modulo h^order, rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [rat(c) for c in coeffs]
        if order is not None:
            cs = (cs + [ZERO] * order)[:order]
        self.coeffs = tuple(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def const(cls, c, order: int) -> "HSeries":
        return cls([c], order)

    def __repr__(self) -> str:
        return f"HSeries({[rat_str(c) for c in self.coeffs]})"

    def __eq__(self, other) -> bool:
        return isinstance(other, HSeries) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _check(self, other: "HSeries") -> None:
        if self.order != other.order:
            raise OrderMismatch(f"orders {self.order} and {other.order}")

    def __add__(self, other: "HSeries") -> "HSeries":
        self._check(other)
        return HSeries(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other: "HSeries") -> "HSeries":
        self._check(other)
        return HSeries(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> "HSeries":
        return HSeries(-a for a in self.coeffs)

    def __mul__(self, other) -> "HSeries":
        if isinstance(other, HSeries):
            return hs_mul(self, other)
        c = rat(other)
        return HSeries(a * c for a in self.coeffs)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def inv(self) -> "HSeries":
        return hs_inv(self)


def series_mul(a: Sequence, b: Sequence) -> tuple:
    """Truncated Cauchy product of two equal-length coefficient tuples."""
    H = len(a)
    out = []
    for k in range(H):
        s = ZERO
        for i in range(k + 1):
            x = a[i]
            if x:
                y = b[k - i]
                if y:
                    s += x * y
        out.append(s)
    return tuple(out)


def series_inv(a: Sequence) -> tuple:
    if not a[0]:
        raise NonInvertible("constant term is zero")
    H = len(a)
    inv0 = ONE / a[0]
    out = [inv0]
    for k in range(1, H):
        s = ZERO
        for i in range(1, k + 1):
            if a[i]:
                s += a[i] * out[k - i]
        out.append(-s * inv0)
    return tuple(out)


def hs_mul(a: HSeries, b: HSeries) -> HSeries:
    a._check(b)
    r = HSeries(())
    r.coeffs = series_mul(a.coeffs, b.coeffs)
    return r


def hs_inv(a: HSeries) -> HSeries:
    r = HSeries(())
    r.coeffs = series_inv(a.coeffs)
    return r


def expand_shifted_inverse(a, b, H: int) -> HSeries:
    """1/(a + b h) as an h-series: sum_k (-b)^k a^(-k-1) h^k."""
    a, b = rat(a), rat(b)
    if not a:
        raise PoleAtSample("1/(a+bh) with a = 0")
    ia = ONE / a
    term = ia
    out = []
    for _ in range(H):
        out.append(term)
        term = term * (-b) * ia
    return HSeries(out)


def h_over(base, hshift, H: int) -> tuple:
    """Coefficients of h/(base + hshift*h) modulo h^H.

    For base = 0 the quotient is the constant 1/hshift.
    """
    base, hshift = rat(base), rat(hshift)
    if not base:
        if not hshift:
            raise PoleAtSample("h/0")
        return (ONE / hshift,) + (ZERO,) * (H - 1)
    inv = expand_shifted_inverse(base, hshift, H).coeffs
    return (ZERO,) + inv[: H - 1]


# --- the normalizing series f ---------------------------------------------


class USeries:
    """Series in u^(-1); coeffs[k] is the coefficient of u^(-k)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        self.coeffs = tuple(rat(c) for c in coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self) -> str:
        return f"USeries({[rat_str(c) for c in self.coeffs]})"

    def __eq__(self, other) -> bool:
        return isinstance(other, USeries) and self.coeffs == other.coeffs


def _binom(n: int, k: int) -> Rat:
    # generalized binomial coefficient, n may be negative
    r = ONE
    for i in range(k):
        r = r * (n - i) / (i + 1)
    return r


def u_shift(c: Sequence, s, K: int) -> list:
    """Coefficients of g(u+s) in u^(-1) up to u^(-K), given those of g(u)."""
    s = rat(s)
    out = [ZERO] * (K + 1)
    for j, cj in enumerate(c[: K + 1]):
        if not cj:
            continue
        for i in range(K + 1 - j):
            if j == 0 and i > 0:
                break
            out[j + i] += cj * _binom(-j, i) * s**i
    return out


def u_mul(a: Sequence, b: Sequence, K: int) -> list:
    out = [ZERO] * (K + 1)
    for i in range(min(K, len(a) - 1) + 1):
        if a[i]:
            for j in range(min(K - i, len(b) - 1) + 1):
                out[i + j] += a[i] * b[j]
    return out


def u_neg_arg(c: Sequence) -> list:
    """g(-u) from g(u)."""
    return [x if k % 2 == 0 else -x for k, x in enumerate(c)]


def target_series(K: int) -> list:
    """(1 - u^-2)^(-1) up to u^(-K)."""
    return [ONE if k % 2 == 0 else ZERO for k in range(K + 1)]


def f_series(spec, K: int) -> USeries:
    """Solve the two functional equations for f order by order.

    gl: f(u) = (1-u^-2)^(-1) f(u+N) and f(u) f(-u) = (1-u^-2)^(-1).
    o/sp: f(u) f(u+kappa) = f(u) f(-u) = (1-u^-2)^(-1).
    Coefficients c_0..c_K are returned; both equations are then re-checked.
    """
    if K < 1:
        raise TruncationDepth("K must be at least 1")
    c = [ONE] + [ZERO] * (K + 1)
    if spec.family == "gl":
        N = spec.N
        tgt = target_series(K + 1)
        # order k+1 of the shift equation fixes c_k; c_{k+1} cancels there
        for k in range(1, K + 1):
            c[k] = ZERO
            rhs = u_mul(tgt, u_shift(c[: k + 1], N, K + 1), K + 1)
            # rhs[k+1] = (stuff without c_k) - k N c_k ; lhs[k+1] = c_{k+1} = 0 here
            c[k] = rhs[k + 1] / (k * N)
        c = c[: K + 1]
        even_rule = _even_from_unitarity(c, K)
    else:
        kappa = spec.kappa
        tgt = target_series(K)
        for k in range(1, K + 1):
            c[k] = ZERO
            prod = u_mul(c[: k + 1], u_shift(c[: k + 1], kappa, K), K)
            c[k] = (tgt[k] - prod[k]) / 2
        c = c[: K + 1]
        even_rule = _even_from_unitarity(c, K)
    for k in range(0, K + 1, 2):
        if even_rule[k] != c[k]:
            raise InternalConsistency(f"f coefficient {k} disagrees between equations")
    f = USeries(c)
    res = f_residuals(spec, f)
    if any(res):
        raise InternalConsistency("f fails its functional equations")
    return f


def _even_from_unitarity(c: Sequence, K: int) -> list:
    """Even coefficients as determined by f(u) f(-u) = (1-u^-2)^(-1) alone."""
    out = list(c)
    for k in range(2, K + 1, 2):
        s = ZERO
        for i in range(1, k):
            s += c[i] * c[k - i] * (-1 if (k - i) % 2 else 1)
        out[k] = (ONE - s) / 2
    return out


def f_residuals(spec, f: USeries) -> list:
    """Differences between both sides of both functional equations, orders 0..K."""
    K = f.order
    c = list(f.coeffs)
    tgt = target_series(K)
    uni = u_mul(c, u_neg_arg(c), K)
    out = [uni[k] - tgt[k] for k in range(K + 1)]
    if spec.family == "gl":
        rhs = u_mul(tgt, u_shift(c, spec.N, K), K)
        out += [c[k] - rhs[k] for k in range(K + 1)]
    else:
        lhs = u_mul(c, u_shift(c, spec.kappa, K), K)
        out += [lhs[k] - tgt[k] for k in range(K + 1)]
    return out


def f_at(f: USeries, a, H: int, hshift=0) -> HSeries:
    """f(u/h) at u = a + hshift*h, as an h-series modulo h^H."""
    a = rat(a)
    if not a:
        raise PoleAtSample("f evaluated at u = 0")
    if f.order < H - 1:
        raise TruncationDepth(f"f known to u^-{f.order}, need u^-{H - 1}")
    x = h_over(a, hshift, H)
    out = [ZERO] * H
    out[0] = f.coeffs[0]
    power = (ONE,) + (ZERO,) * (H - 1)
    for k in range(1, H):
        power = series_mul(power, x)
        ck = f.coeffs[k]
        if ck:
            for i in range(H):
                out[i] += ck * power[i]
    return HSeries(out)


# --- f cache file ----------------------------------------------------------


def format_f_cache(spec, f: USeries) -> str:
    lines = [f"{spec.family} {spec.N} {f.order}"]
    lines += [rat_str(c) for c in f.coeffs]
    return "\n".join(lines) + "\n"


def parse_f_cache(text: str) -> tuple:
    """Return (family, N, K, USeries) from cache text."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty f cache")
    head = lines[0].split()
    if len(head) != 3 or not head[1].isdigit() or not head[2].isdigit():
        raise ParseError(f"bad f cache header {lines[0]!r}")
    family, N, K = head[0], int(head[1]), int(head[2])
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != K + 1:
        raise ParseError(f"expected {K + 1} coefficients, found {len(body)}")
    return family, N, K, USeries(rat(x) for x in body)


# --- univariate polynomials and rational reconstruction --------------------


def _trim(p: Sequence) -> tuple:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(p)


def p_deg(p: Sequence) -> int:
    return len(_trim(p)) - 1


def p_eval(p: Sequence, t) -> Rat:
    acc = ZERO
    for c in reversed(p):
        acc = acc * t + c
    return acc


def p_add(a: Sequence, b: Sequence) -> tuple:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)])


def p_scale(a: Sequence, c) -> tuple:
    return _trim([x * c for x in a])


def p_mul(a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def p_divmod(a: Sequence, b: Sequence) -> tuple:
    a, b = list(_trim(a)), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        s = len(a) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            a[s + i] -= c * y
        a = list(_trim(a))
    return _trim(q), tuple(a)


def p_gcd(a: Sequence, b: Sequence) -> tuple:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, p_divmod(a, b)[1]
    if not a:
        return ()
    return p_scale(a, ONE / a[-1])


class RatFunc1:
    """Reduced univariate rational function with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence, den: Sequence):
        num, den = _trim([rat(x) for x in num]), _trim([rat(x) for x in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            den = (ONE,)
        g = p_gcd(num, den) if num else (ONE,)
        if len(g) > 1:
            num = p_divmod(num, g)[0]
            den = p_divmod(den, g)[0]
        lead = den[-1]
        self.num = p_scale(num, ONE / lead)
        self.den = p_scale(den, ONE / lead)

    def __call__(self, t) -> Rat:
        return p_eval(self.num, t) / p_eval(self.den, t)

    def __eq__(self, other) -> bool:
        return isinstance(other, RatFunc1) and (self.num, self.den) == (other.num, other.den)

    def __repr__(self) -> str:
        return f"RatFunc1({[rat_str(c) for c in self.num]}, {[rat_str(c) for c in self.den]})"


def _interpolate(xs: Sequence, ys: Sequence) -> tuple:
    # Newton divided differences, then expand to monomial basis
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly: tuple = ()
    for i in range(n - 1, -1, -1):
        poly = p_add(p_mul(poly, (-xs[i], ONE)), (coef[i],))
    return poly


def reconstruct_rational(samples: Sequence, deg_num: int, deg_den: int) -> RatFunc1:
    """Cauchy interpolation through (t, g(t)) pairs within degree bounds.

    The first deg_num+deg_den+1 samples determine the candidate; every
    remaining sample is used as a held-out consistency check.
    """
    pts = [(rat(t), rat(y)) for t, y in samples]
    need = deg_num + deg_den + 1
    if len(pts) < need + 1:
        raise DegreeBoundExceeded(f"need at least {need + 1} samples, got {len(pts)}")
    xs = [t for t, _ in pts]
    if len(set(xs)) != len(xs):
        raise DegreeBoundExceeded("sample abscissae are not distinct")
    fit, held = pts[:need], pts[need:]
    fx = [t for t, _ in fit]
    modulus: tuple = (ONE,)
    for t in fx:
        modulus = p_mul(modulus, (-t, ONE))
    r0, r1 = modulus, _interpolate(fx, [y for _, y in fit])
    t0, t1 = (), (ONE,)
    while r1 and p_deg(r1) > deg_num:
        q, r = p_divmod(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, p_add(t0, p_scale(p_mul(q, t1), -ONE))
    if not t1 or p_deg(t1) > deg_den:
        raise DegreeBoundExceeded("no interpolant within the degree bounds")
    if any(not p_eval(t1, t) for t in fx):
        raise DegreeBoundExceeded("interpolant has a pole at a sample point")
    g = RatFunc1(r1, t1)
    for t, y in held:
        if not p_eval(g.den, t) or g(t) != y:
            raise DegreeBoundExceeded("held-out sample disagrees with the interpolant")
    return g


def pole_free_at(g: RatFunc1, t0) -> bool:
    return bool(p_eval(g.den, rat(t0)))
