from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

import oracles as O
from qvakit.algebra import make_spec
from qvakit.errors import EmbeddingError, PoleAtSample, UnsupportedFamily
from qvakit.qva import (
    EvalModule,
    LevelContext,
    SymbolExpr,
    adjoint_ops,
    apply_ops,
    call,
    compile_calls,
    make_word,
    program,
    realize,
    realize_symbol,
    rho_apply,
    sigma_apply,
    trace_symbol,
    traced_image,
    traced_image_fast,
    vertex_apply,
)
from qvakit.rmatrix import arg, r_single, staggered
from qvakit.scalar import Rat
from qvakit.tensor import TensorOp, compose, embed, partial_trace

GL2, O3 = make_spec("gl", 2), make_spec("o", 3)

rats = st.fractions(min_value=-40, max_value=40, max_denominator=30).filter(bool).map(
    lambda f: Rat(f.numerator, f.denominator))


def modules(spec, *pts):
    return [EvalModule(spec, (Rat(p),)) for p in pts]


class TestRealize:
    def test_empty_word(self):
        W = realize(GL2, make_word([], []), modules(GL2, 3, 5), 4)
        assert W.is_identity() and W.arity == 2

    @pytest.mark.parametrize("n,m", [(1, 0), (1, 1), (2, 1)])
    def test_classical_limit(self, n, m):
        u, v = [Rat(1, 2), Rat(-3)][:n], [Rat(7, 4)][:m]
        W = realize(O3, make_word(u, v), modules(O3, 2, -5), 3)
        assert W.truncate(1).is_identity()

    def test_one_letter_is_one_r_matrix(self):
        u, a = Rat(2, 3), Rat(-1, 5)
        W = realize(GL2, make_word([u]), [EvalModule(GL2, (a,))], 4)
        assert W == r_single(GL2, "normalized", arg(u - a), 4)

    def test_distinct_points(self):
        with pytest.raises(EmbeddingError):
            EvalModule(GL2, (Rat(1), Rat(1)))

    def test_module_count(self):
        with pytest.raises(EmbeddingError):
            realize(GL2, make_word([1], [2]), modules(GL2, 3), 3)


class TestSigma:
    def ctx(self, spec=GL2, H=4):
        return LevelContext.critical(spec, H)

    def test_empty_words_unchanged(self):
        s = realize_symbol(self.ctx(), *modules(GL2, 3, 5), 0, 0, [], [])
        assert sigma_apply(s, Rat(1, 3)).realization.is_identity()

    def test_classical_limit_unchanged(self):
        s = realize_symbol(self.ctx(), *modules(GL2, 3, 5), 1, 1, [Rat(1)], [Rat(2)])
        assert sigma_apply(s, Rat(1, 3)).realization.truncate(1) == s.realization.truncate(1)

    def test_conjugation_matches_hand_expansion(self):
        # to first order, Rbar(w) = I + h A with A = I/(N w) - P/w, and its inverse is I - h A
        z, u, v = Rat(1, 3), Rat(2), Rat(-5, 7)
        s = realize_symbol(self.ctx(GL2, 2), *modules(GL2, 3, 5), 1, 1, [u], [v])
        W = O.dense_series(s.realization)
        w = Fraction(z + u - v)
        A2 = [[O.identity(4)[i][j] / (2 * w) - O.swap(2)[i][j] / w for j in range(4)] for i in range(4)]
        A = O.kron(A2, O.identity(4))
        X = [O.identity(16), A]
        Xi = [O.identity(16), [[-x for x in row] for row in A]]
        want = O.series_mat_mul(O.series_mat_mul(X, W), Xi)
        assert O.dense_series(sigma_apply(s, z).realization) == want

    @given(rats, rats, rats)
    def test_inverse_map_undoes(self, z, u, v):
        ctx = self.ctx(O3, 3)
        st_ = make_word([u], [v])
        mods = tuple(modules(O3, 3, 5))
        s = SymbolExpr(ctx, st_, mods, (call("sigma", (0, 1), z), call("sigma", (0, 1), z, inverse=True)))
        try:
            got = s.realization
        except PoleAtSample:
            assume(False)
        assert got == SymbolExpr(ctx, st_, mods).realization


class TestGlOnlyMaps:
    def test_mu_needs_gl(self):
        ctx = LevelContext.critical(O3, 3)
        with pytest.raises(UnsupportedFamily):
            program(ctx, call("mu", (0, 1), 1, 2), make_word([1], [2]))

    def test_mu_needs_critical_level(self):
        ctx = LevelContext.at_level(GL2, 5, 3)
        with pytest.raises(UnsupportedFamily):
            program(ctx, call("gamma", (0, 1), 1, 2), make_word([1], [2]))

    def test_vertex_map_has_no_inverse(self):
        with pytest.raises(EmbeddingError):
            program(LevelContext.critical(GL2, 3), call("Yrho", (0, 1), 1, inverse=True), make_word([1], [2]))

    @pytest.mark.parametrize("name", ["gamma", "gamma_inv", "mu", "nu"])
    def test_classical_limit(self, name):
        ctx = LevelContext.critical(GL2, 3)
        s = realize_symbol(ctx, *modules(GL2, 3, 5), 1, 1, [Rat(1)], [Rat(-2)])
        t = s.then(call(name, (0, 1), Rat(1, 3), Rat(2, 7)))
        assert t.realization.truncate(1) == s.realization.truncate(1)


class TestVertex:
    def test_vacuum(self):
        ctx = LevelContext.critical(GL2, 4)
        em1, em2 = modules(GL2, 3, 5)
        s = realize_symbol(ctx, em1, em2, 0, 2, [], [Rat(1), Rat(-2)])
        assert vertex_apply(s, Rat(1, 3)) == realize(GL2, make_word([Rat(1), Rat(-2)]), [em1], 4)

    def test_one_letter_each(self):
        ctx = LevelContext.critical(O3, 3)
        em1, em2 = modules(O3, 3, 5)
        z, u, v = Rat(1, 3), Rat(2), Rat(-1, 4)
        s = realize_symbol(ctx, em1, em2, 1, 1, [u], [v])
        assert vertex_apply(s, z) == realize(O3, make_word([u + z, v]), [em1], 3)

    def test_nu_mode_needs_x(self):
        s = realize_symbol(LevelContext.critical(GL2, 3), *modules(GL2, 3, 5), 1, 1, [1], [2])
        with pytest.raises(EmbeddingError):
            vertex_apply(s, 1, mode="nu")


class TestTraces:
    def test_n_one_leading_term_is_n(self):
        ctx = LevelContext.critical(O3, 3)
        T = trace_symbol(ctx, 1, Rat(2), EvalModule(O3, (Rat(5),)))
        assert T.truncate(1) == TensorOp.identity(3, 1, 1).scale(3)

    def test_gl2_determinant_leading_term_is_one(self):
        ctx = LevelContext.critical(GL2, 3)
        T = trace_symbol(ctx, 2, Rat(2), EvalModule(GL2, (Rat(5), Rat(-1))))
        assert T.truncate(1).is_identity()

    @given(rats, rats, rats)
    def test_fast_route_matches_direct(self, z, u0, v0):
        ctx = LevelContext.critical(GL2, 3)
        st_ = make_word(staggered(GL2, 2, u0), staggered(GL2, 1, v0))
        mods = modules(GL2, 3, 5)
        calls = [call("rho", (0, 1), z)]
        try:
            fast = traced_image_fast(ctx, st_, mods, calls)
        except PoleAtSample:
            assume(False)
        assert fast == traced_image(ctx, st_, mods, [0, 1], calls)

    @given(st.lists(st.integers(-2, 2), min_size=16, max_size=16), rats)
    def test_adjoint_is_trace_dual(self, ks, z):
        # tr_aux(K . P(W)) = tr_aux(P*(K) . W) for any operator K on the auxiliary factors
        ctx = LevelContext.critical(GL2, 2)
        st_ = make_word([Rat(1)], [Rat(-3)])
        mods = modules(GL2, 3, 5)
        try:
            ops, _ = compile_calls(ctx, st_, [call("rho", (0, 1), z)])
        except PoleAtSample:
            assume(False)
        K = TensorOp(2, 2, 2, {i: (Rat(k), Rat(0)) for i, k in enumerate(ks) if k})
        W = realize(GL2, st_, mods, 2)
        lhs = partial_trace(compose(embed(K, 4, (0, 1)), apply_ops(W, ops)), [0, 1])
        rhs = partial_trace(compose(embed(adjoint_ops(K, ops), 4, (0, 1)), W), [0, 1])
        assert lhs == rhs


def test_rho_uses_level_shift():
    a = LevelContext.critical(GL2, 3)
    b = LevelContext.at_level(GL2, 4, 3)
    s = realize_symbol(a, *modules(GL2, 3, 5), 1, 1, [Rat(1)], [Rat(2)])
    t = SymbolExpr(b, s.struct, s.modules)
    assert rho_apply(s, Rat(1, 3)).realization != rho_apply(t, Rat(1, 3)).realization
