"""Hirzebruch-Jung calculus for cyclic quotient singularities.

A singularity ``C^2/Z_d`` with weights ``(1, r)`` is resolved by a chain of
rational curves with self-intersections ``-b_1, ..., -b_l`` where
``d/r = b_1 - 1/(b_2 - 1/(...))``.  Everything here is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import DegenerateConfiguration, InvalidChain
from .lattice import solve_rational


@dataclass(frozen=True)
class HJChain:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise InvalidChain("chain must be nonempty")
        bad = [b for b in self.coeffs if b < 2]
        if bad:
            raise InvalidChain(f"chain coefficients must be >= 2, got {bad[0]}")

    @classmethod
    def of(cls, coeffs: Sequence[int]) -> "HJChain":
        return cls(tuple(int(b) for b in coeffs))

    def __len__(self) -> int:
        return len(self.coeffs)

    def reversed(self) -> "HJChain":
        return HJChain(self.coeffs[::-1])

    def gram(self) -> list[list[int]]:
        """Intersection matrix of the chain curves."""
        n = len(self.coeffs)
        return [
            [-self.coeffs[i] if i == j else int(abs(i - j) == 1) for j in range(n)] for i in range(n)
        ]


@dataclass(frozen=True)
class CyclicSingularity:
    d: int
    r: int

    def __post_init__(self):
        if self.d < 2 or not 0 < self.r < self.d or gcd(self.d, self.r) != 1:
            raise ValueError(f"({self.d}, {self.r}) is not a cyclic singularity type")


@dataclass(frozen=True)
class LocalAction:
    """Action ``e.(z1, z2) = (e^j2 z1, e^j1 z2)`` of ``Z_m``."""

    m: int
    j1: int
    j2: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("isotropy order must be positive")
        if gcd(gcd(self.j1, self.j2), self.m) != 1:
            raise ValueError("gcd(j1, j2, m) must be 1")


@dataclass(frozen=True)
class LocalActionReduction:
    m1: int
    m2: int
    d: int
    e1: int
    e2: int


def _check(chain) -> HJChain:
    return chain if isinstance(chain, HJChain) else HJChain.of(chain)


def hj_eval(chain) -> tuple[int, int]:
    """Evaluate ``[b_1, ..., b_l]`` to the reduced pair ``(d, r)``."""
    chain = _check(chain)
    # continuant recurrence from the right: p/q = b - q'/p'
    p, q = 1, 0
    for b in reversed(chain.coeffs):
        p, q = b * p - q, p
    return p, q


def hj_expand(s: CyclicSingularity) -> HJChain:
    coeffs = []
    d, r = s.d, s.r
    while r:
        b = -(-d // r)
        coeffs.append(b)
        d, r = r, b * r - d
    return HJChain(tuple(coeffs))


def dual(s: CyclicSingularity) -> CyclicSingularity:
    """The singularity whose chain is the reverse of that of ``s``."""
    return CyclicSingularity(s.d, pow(s.r, -1, s.d))


def pullback_coeffs(chain, tail_end: str = "first") -> list[Fraction]:
    """Coefficients ``r_i`` with ``A~ + sum r_i C_i`` orthogonal to every ``C_j``.

    ``A~`` meets only the chain end named by ``tail_end`` (``"first"`` or
    ``"last"``), once.  Output is indexed along the chain.
    """
    chain = _check(chain)
    if tail_end not in ("first", "last"):
        raise ValueError("tail_end must be 'first' or 'last'")
    n = len(chain)
    rhs = [0] * n
    rhs[0 if tail_end == "first" else n - 1] = -1
    return solve_rational(chain.gram(), rhs)


def log_discrepancies(chain, tail_attached: bool = True) -> list[Fraction]:
    """Coefficients ``a_i`` of ``K~ = pi^*(K+D) - D~ + sum a_i C_i``.

    They solve ``-a_i b_i + a_{i-1} + a_{i+1} - b_i = -2`` with boundary values
    ``a_0 = -1`` (tail attached at ``C_1``) or ``0``, and ``a_{l+1} = 0``.
    """
    chain = _check(chain)
    b = chain.coeffs
    n = len(b)
    a0 = -1 if tail_attached else 0
    rhs = [b[i] - 2 for i in range(n)]
    rhs[0] -= a0
    return solve_rational(chain.gram(), rhs)


def local_contribution(left: CyclicSingularity | tuple[int, int] | None,
                       right: CyclicSingularity | tuple[int, int] | None,
                       b: int) -> Fraction:
    """Local term ``l_p = 1 + d1 (d2 - 1) / (b d1 d2 - a1 d2 - a2 d1)``.

    ``left`` is the side of the chain facing the tail ``D``, ``right`` the far
    side; a missing side is ``None`` (encoded as ``(d, a) = (1, 0)``).
    """
    d1, a1 = _side(left)
    d2, a2 = _side(right)
    if b < 2:
        raise InvalidChain(f"central coefficient must be >= 2, got {b}")
    den = b * d1 * d2 - a1 * d2 - a2 * d1
    if den <= 0:
        raise DegenerateConfiguration(f"denominator {den} is not positive")
    return 1 + Fraction(d1 * (d2 - 1), den)


def _side(side) -> tuple[int, int]:
    if side is None:
        return 1, 0
    if isinstance(side, CyclicSingularity):
        return side.d, side.r
    d, a = side
    return int(d), int(a)


def local_contribution_at(chain, j: int) -> Fraction:
    """``l_p`` for a curve meeting ``C_j`` (1-based) with the tail at ``C_1``."""
    chain = _check(chain)
    b = chain.coeffs
    if not 1 <= j <= len(b):
        raise ValueError("j out of range")
    left = hj_eval(b[: j - 1][::-1]) if j > 1 else (1, 0)
    right = hj_eval(b[j:]) if j < len(b) else (1, 0)
    return local_contribution(left, right, b[j - 1])


def reduce_action(a: LocalAction) -> LocalActionReduction:
    m1 = gcd(a.j1, a.m)
    m2 = gcd(a.j2, a.m)
    d = a.m // (m1 * m2)
    e1 = (a.j1 // m1) % d
    e2 = (a.j2 // m2) % d
    return LocalActionReduction(m1, m2, d, e1, e2)
