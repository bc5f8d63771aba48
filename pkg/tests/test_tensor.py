from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

import oracles as O
from qvakit import _kernels
from qvakit.algebra import make_spec
from qvakit.errors import EmbeddingError, ShapeMismatch, UnsupportedKind
from qvakit.scalar import HSeries, Rat
from qvakit.tensor import (
    TensorOp,
    compose,
    compose_twisted,
    elementary_op,
    embed,
    inverse,
    kron,
    partial_trace,
    permute,
    rank_h0,
    trace,
    transpose,
)

GL2, GL3, O3, O4, SP4 = (make_spec(*a) for a in [("gl", 2), ("gl", 3), ("o", 3), ("o", 4), ("sp", 4)])

coeff = st.integers(-3, 3).map(Rat)


@st.composite
def ops(draw, N=2, arity=2, H=3, density=0.5):
    D = N**arity
    entries = {}
    for k in range(D * D):
        if draw(st.floats(0, 1)) < density:
            s = tuple(draw(coeff) for _ in range(H))
            if any(s):
                entries[k] = s
    return TensorOp(N, arity, H, entries)


def dense_op(op):
    return O.dense_series(op)


class TestElementary:
    def test_flip_n2(self):
        assert O.dense(elementary_op("P", GL2, 1)) == O.swap(2)

    def test_q_trace_and_square(self):
        Q = elementary_op("Q", O3, 2)
        assert sum(O.dense(Q)[i][i] for i in range(9)) == 3
        assert compose(Q, Q) == Q.scale(3)

    def test_q_square_for_sp(self):
        # recorded fact: the eps signs cancel in Q^2, so Q^2 = N Q holds for sp too
        Q = elementary_op("Q", SP4, 1)
        assert compose(Q, Q) == Q.scale(4)

    def test_matrix_unit(self):
        e11 = elementary_op("e", GL2, 1, 1, 1)
        assert O.dense(e11) == [[1, 0], [0, 0]]

    def test_matrix_unit_range(self):
        with pytest.raises(EmbeddingError):
            elementary_op("e", GL2, 1, 3, 1)

    def test_q_not_for_gl(self):
        with pytest.raises(UnsupportedKind):
            elementary_op("Q", GL2, 1)

    def test_prime_transpose_of_g(self):
        G = elementary_op("G", O3, 2)
        assert transpose(G, [0], "prime", O3) == G

    def test_q_is_prime_transposed_flip(self):
        for spec in (O3, O4, SP4):
            P, Q = elementary_op("P", spec, 2), elementary_op("Q", spec, 2)
            assert transpose(P, [0], "prime", spec) == Q

    def test_plain_partial_transpose_is_not_q(self):
        # the o_N identity P^{t1} = Q does not hold with the plain transpose
        P, Q = elementary_op("P", O3, 1), elementary_op("Q", O3, 1)
        assert transpose(P, [0]) != Q


class TestEmbed:
    def test_leading_pair(self):
        P = elementary_op("P", GL2, 1)
        assert O.dense(embed(P, 3, (0, 1))) == O.kron(O.swap(2), O.identity(2))

    def test_identity(self):
        I2 = TensorOp.identity(2, 2, 3)
        assert embed(I2, 4, (1, 3)).is_identity()

    def test_outer_pair_flips_factors_one_and_three(self):
        P13 = O.dense(embed(elementary_op("P", GL2, 1), 3, (0, 2)))
        for a, b, c in product(range(2), repeat=3):
            col = a * 4 + b * 2 + c
            row = c * 4 + b * 2 + a
            assert P13[row][col] == 1
            assert sum(P13[r][col] for r in range(8)) == 1

    def test_bad_positions(self):
        P = elementary_op("P", GL2, 1)
        with pytest.raises(EmbeddingError):
            embed(P, 3, (0, 0))
        with pytest.raises(EmbeddingError):
            embed(P, 3, (0, 3))

    @given(ops(arity=1), ops(arity=1))
    def test_kron_matches_embeds(self, a, b):
        assert kron(a, b) == compose(embed(a, 2, (0,)), embed(b, 2, (1,)))


class TestCompose:
    def test_flip_is_involution(self):
        P = elementary_op("P", GL3, 2)
        assert compose(P, P).is_identity()

    def test_identity_right(self):
        P = elementary_op("P", GL3, 2)
        assert compose(P, TensorOp.identity(3, 2, 2)) == P

    def test_matrix_units(self):
        e = lambda i, j: embed(elementary_op("e", GL2, 1, i, j), 2, (0,))  # noqa: E731
        assert compose(e(1, 2), e(2, 1)) == e(1, 1)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            compose(TensorOp.identity(2, 2, 3), TensorOp.identity(2, 2, 4))

    @given(ops(), ops())
    def test_matches_dense_oracle(self, a, b):
        assert dense_op(compose(a, b)) == O.series_mat_mul(dense_op(a), dense_op(b))

    @given(ops(), ops(), ops())
    def test_associative(self, a, b, c):
        assert compose(compose(a, b), c) == compose(a, compose(b, c))

    @given(ops(density=0.7))
    def test_inverse(self, a):
        x = TensorOp.identity(2, 2, 3) + TensorOp(2, 2, 3, {k: (Rat(0),) + s[1:] for k, s in a.entries.items()})
        if not any(s[1:] != (0, 0) for s in x.entries.values()):
            return
        assert compose(x, inverse(x)).is_identity()
        assert compose(inverse(x), x).is_identity()


class TestTwisted:
    @given(ops(), ops())
    def test_empty_opposite_is_compose(self, a, b):
        assert compose_twisted(a, b, []) == compose(a, b)

    @given(ops(), ops())
    def test_full_opposite_reverses(self, a, b):
        assert compose_twisted(a, b, [0, 1]) == compose(b, a)

    @given(ops(arity=1), ops(arity=1), ops(arity=1), ops(arity=1))
    def test_opposite_on_second_factor(self, a1, a2, b1, b2):
        # (a1 (x) a2) ._{2} (b1 (x) b2) = a1 b1 (x) b2 a2
        lhs = compose_twisted(kron(a1, a2), kron(b1, b2), [1])
        assert lhs == kron(compose(a1, b1), compose(b2, a2))


class TestTraceTranspose:
    def test_trace_of_identity(self):
        assert partial_trace(TensorOp.identity(3, 2, 2), [0]) == TensorOp.identity(3, 1, 2).scale(3)

    def test_trace_of_flip(self):
        assert partial_trace(elementary_op("P", GL3, 2), [0]).is_identity()

    def test_full_trace_of_flip(self):
        assert trace(elementary_op("P", GL2, 3)) == HSeries([2], 3)

    @given(ops(arity=2))
    def test_transpose_involution(self, a):
        assert transpose(transpose(a, [1]), [1]) == a

    @given(ops(N=3, arity=2, H=2, density=0.2))
    def test_prime_involution(self, a):
        assert transpose(transpose(a, [0], "prime", O3), [0], "prime", O3) == a

    def test_prime_needs_matching_n(self):
        with pytest.raises(ShapeMismatch):
            transpose(TensorOp.identity(2, 2, 1), [0], "prime", O4)

    @given(ops(arity=2))
    def test_trace_matches_oracle(self, a):
        got = O.dense(partial_trace(a, [0]), 0)
        M = O.dense(a, 0)
        want = [[sum(M[i * 2 + j][i * 2 + k] for i in range(2)) for k in range(2)] for j in range(2)]
        assert got == want

    @given(ops(arity=3, H=2, density=0.3))
    def test_permute_round_trip(self, a):
        assert permute(permute(a, [1, 2, 0]), [2, 0, 1]) == a

    def test_rank_of_flip_parts(self):
        P, I = elementary_op("P", GL3, 1), TensorOp.identity(3, 2, 1)
        assert rank_h0(I - P) == 3
        assert rank_h0(I + P) == 6
        assert rank_h0(I - P) == O.rank(O.dense(I - P))


class TestKernels:
    @given(ops(density=0.6), ops(density=0.6))
    def test_backends_agree(self, a, b):
        ref = _kernels.spmm(a.entries, b.entries, a.D, a.H)
        try:
            from qvakit import _ckernels
        except ImportError:
            pytest.skip("compiled kernels not built")
        assert _ckernels.spmm(a.entries, b.entries, a.D, a.H) == ref

    def test_cancellation_drops_entries(self):
        a = TensorOp(1, 1, 2, {0: (Rat(1), Rat(0))})
        b = TensorOp(1, 1, 2, {0: (Rat(0), Rat(0))})
        assert compose(a, b).entries == {}


def test_dump_uses_one_based_digits():
    assert elementary_op("e", GL2, 1, 1, 2).dump() == "1 2 [1/1]"


def test_fraction_oracle_sanity():
    assert O.geometric(Fraction(1), Fraction(-1), 3) == [1, 1, 1]
