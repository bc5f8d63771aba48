"""Structure constants of the three classical families."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedFamily
from .scalar import Rat

FAMILIES = ("gl", "o", "sp")


@dataclass(frozen=True)
class AlgebraSpec:
    family: str
    N: int
    eps_table: tuple
    epsilon: int
    kappa: Rat
    c_crit: Rat

    @property
    def label(self) -> str:
        return f"{self.family}_{self.N}"

    def prime_index(self, i: int) -> int:
        # 0-based version of i' = N - i + 1
        return self.N - 1 - i

    def crit_shift(self) -> Rat:
        """Coefficient of h in h*epsilon*c_crit."""
        return self.epsilon * self.c_crit


def make_spec(family: str, N: int) -> AlgebraSpec:
    if family not in FAMILIES:
        raise UnsupportedFamily(f"unknown family {family!r}")
    if N < 2:
        raise UnsupportedFamily(f"N must be at least 2, got {N}")
    if family == "sp" and N % 2:
        raise UnsupportedFamily("sp requires even N")
    if family == "gl":
        return AlgebraSpec("gl", N, tuple([1] * N), 1, Rat(0), Rat(-N))
    if family == "o":
        return AlgebraSpec("o", N, tuple([1] * N), 1, Rat(N, 2) - 1, Rat(-N + 2))
    eps = tuple([1] * (N // 2) + [-1] * (N // 2))
    return AlgebraSpec("sp", N, eps, 2, Rat(N, 2) + 1, Rat(-N, 2) - 1)


def parse_spec(label: str) -> AlgebraSpec:
    """Parse labels like ``gl_2`` or ``o3``."""
    s = label.replace("_", "")
    for fam in ("gl", "sp", "o"):
        if s.startswith(fam) and s[len(fam):].isdigit():
            return make_spec(fam, int(s[len(fam):]))
    raise UnsupportedFamily(f"cannot parse algebra label {label!r}")
