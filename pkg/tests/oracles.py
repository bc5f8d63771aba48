"""Independent reference computations: dense Fraction matrices, no package kernels."""

from fractions import Fraction
from itertools import product


def frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def dense(op, k: int = 0) -> list:
    """The h^k coefficient of a TensorOp as a list of Fraction rows."""
    D = op.D
    M = [[Fraction(0)] * D for _ in range(D)]
    for key, s in op.entries.items():
        r, c = divmod(key, D)
        M[r][c] = frac(s[k])
    return M


def dense_series(op) -> list:
    return [dense(op, k) for k in range(op.H)]


def mat_mul(A: list, B: list) -> list:
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(m)), Fraction(0)) for j in range(p)] for i in range(n)]


def series_mat_mul(A: list, B: list) -> list:
    """Truncated product of two matrix-valued h-series given as coefficient lists."""
    H = len(A)
    D = len(A[0])
    out = []
    for k in range(H):
        acc = [[Fraction(0)] * D for _ in range(D)]
        for i in range(k + 1):
            P = mat_mul(A[i], B[k - i])
            acc = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(acc, P)]
        out.append(acc)
    return out


def identity(D: int) -> list:
    return [[Fraction(int(i == j)) for j in range(D)] for i in range(D)]


def kron(A: list, B: list) -> list:
    n, m = len(A), len(B)
    return [[A[i // m][j // m] * B[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def swap(N: int) -> list:
    """The flip of two tensor factors of C^N."""
    D = N * N
    M = [[Fraction(0)] * D for _ in range(D)]
    for a, b in product(range(N), repeat=2):
        M[b * N + a][a * N + b] = Fraction(1)
    return M


def rank(M: list) -> int:
    A = [row[:] for row in M]
    r = 0
    cols = len(A[0]) if A else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c] / A[r][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
    return r


def geometric(a: Fraction, b: Fraction, H: int) -> list:
    """Coefficients of 1/(a + b h) by long division."""
    out, rem = [], Fraction(1)
    for _ in range(H):
        q = rem / a
        out.append(q)
        rem = -q * b
    return out
