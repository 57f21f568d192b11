"""Exact integer and rational linear algebra.

Rationals are :class:`fractions.Fraction` throughout (always reduced, positive
denominator).  Integer matrices are immutable :class:`IntMatrix` values; the
Smith normal form returns the transforming matrices so every result can be
re-checked by multiplication.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt
from typing import Callable, Iterable, Sequence

from sympy import factorint
from sympy import isprime as _sympy_isprime

from .errors import NonCoprimeModuli, SingularSystem

Rat = Fraction


def as_rat(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


# ---------------------------------------------------------------------------
# Integer matrices


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("matrix dimensions do not match entry count")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("incompatible shapes for multiplication")
        cols_t = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols_t) for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, out)

    def transpose(self) -> "IntMatrix":
        if self.rows == 0:
            return IntMatrix.zeros(self.cols, 0)
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)))

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def diagonal(self) -> list[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def det(self) -> int:
        """Bareiss fraction-free determinant."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = self.to_lists()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


def _pick_pivot(a, t, m, n):
    best = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            v = row[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
                if best[0] == 1:
                    return best
    return best


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, U, V)`` with ``U @ M @ V == D`` and ``U``, ``V`` unimodular.

    ``D`` is diagonal with nonnegative entries ``d_1 | d_2 | ...``.  Pivots are
    chosen of least absolute value to keep entry growth down.
    """
    m, n = M.rows, M.cols
    a = M.to_lists()
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        ra, rs = a[dst], a[src]
        for j in range(n):
            if rs[j]:
                ra[j] -= q * rs[j]
        ua, us = u[dst], u[src]
        for j in range(m):
            if us[j]:
                ua[j] -= q * us[j]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in a:
            if row[src]:
                row[dst] -= q * row[src]
        for row in v:
            if row[src]:
                row[dst] -= q * row[src]

    for t in range(min(m, n)):
        best = _pick_pivot(a, t, m, n)
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
                    if a[t][j]:
                        clean = False
            if not clean:
                # move the smallest leftover in row/column t onto the diagonal
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, i, j = min(cand)
                if i != t:
                    swap_rows(i, t)
                if j != t:
                    swap_cols(j, t)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    return IntMatrix.from_rows(a, n), IntMatrix.from_rows(u, m), IntMatrix.from_rows(v, n)


def is_smith_form(D: IntMatrix) -> bool:
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j and D[i, j]:
                return False
    diag = D.diagonal()
    if any(d < 0 for d in diag):
        return False
    for a, b in zip(diag, diag[1:]):
        if a == 0 and b != 0:
            return False
        if a and b % a:
            return False
    return True


# ---------------------------------------------------------------------------
# Finite abelian groups


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z^free_rank`` plus torsion in primary form.

    ``torsion`` holds ``(prime, exponent, multiplicity)`` triples, sorted; the
    summand ``Z_{p^e}`` occurs ``multiplicity`` times.
    """

    free_rank: int = 0
    torsion: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        keys = [(p, e) for p, e, _ in self.torsion]
        if keys != sorted(set(keys)):
            raise ValueError("torsion must be sorted with distinct (prime, exponent) keys")
        for p, e, c in self.torsion:
            if e < 1 or c < 1 or not is_prime(p):
                raise ValueError(f"invalid torsion entry {(p, e, c)}")

    @classmethod
    def from_counter(cls, free_rank: int, counts: Counter) -> "FiniteAbelianGroup":
        tors = tuple(sorted((p, e, c) for (p, e), c in counts.items() if c))
        return cls(free_rank, tors)

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[tuple[int, int]] | Iterable[int], free_rank: int = 0):
        """Build from cyclic summands ``Z_n`` given as ``n`` or ``(n, count)``."""
        counts: Counter = Counter()
        for item in orders:
            n, k = item if isinstance(item, tuple) else (item, 1)
            if n == 0:
                free_rank += k
                continue
            n = abs(n)
            if n == 1 or k == 0:
                continue
            for p, e in factorint(n).items():
                counts[(p, e)] += k
        return cls.from_counter(free_rank, counts)

    def direct_sum(self, other: "FiniteAbelianGroup") -> "FiniteAbelianGroup":
        counts = Counter({(p, e): c for p, e, c in self.torsion})
        for p, e, c in other.torsion:
            counts[(p, e)] += c
        return FiniteAbelianGroup.from_counter(self.free_rank + other.free_rank, counts)

    @property
    def torsion_order(self) -> int:
        out = 1
        for p, e, c in self.torsion:
            out *= p ** (e * c)
        return out

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def cyclic_factors(self) -> list[int]:
        """All primary cyclic orders ``p^e`` with repetition."""
        return [p**e for p, e, c in self.torsion for _ in range(c)]

    def invariant_factors(self) -> list[int]:
        """Torsion as ``k_1 | k_2 | ... | k_s`` (all ``k_i > 1``)."""
        by_prime: dict[int, list[int]] = {}
        for p, e, c in self.torsion:
            by_prime.setdefault(p, []).extend([e] * c)
        s = max((len(v) for v in by_prime.values()), default=0)
        factors = [1] * s
        for p, exps in by_prime.items():
            exps = sorted(exps, reverse=True)
            for k, e in enumerate(exps):
                factors[s - 1 - k] *= p**e
        return factors

    @classmethod
    def from_invariant_factors(cls, factors: Sequence[int], free_rank: int = 0):
        return cls.from_cyclic_orders(list(factors), free_rank)

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        for p, e, c in self.torsion:
            q = p**e
            parts.append(f"Z_{q}" if c == 1 else f"Z_{q}^{c}")
        return " + ".join(parts) if parts else "0"


def cokernel(M: IntMatrix) -> FiniteAbelianGroup:
    """``Z^cols`` modulo the row span of ``M`` (rows are relations)."""
    if M.rows == 0 or M.cols == 0:
        return FiniteAbelianGroup(M.cols)
    D, _, _ = smith_normal_form(M)
    diag = [d for d in D.diagonal() if d]
    return FiniteAbelianGroup.from_cyclic_orders(diag, M.cols - len(diag))


# ---------------------------------------------------------------------------
# Rational forms


@dataclass(frozen=True)
class SymmetricForm:
    dim: int
    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.gram) != self.dim or any(len(r) != self.dim for r in self.gram):
            raise ValueError("gram matrix shape does not match dim")
        for i in range(self.dim):
            for j in range(i):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram matrix is not symmetric")

    @classmethod
    def from_rows(cls, rows) -> "SymmetricForm":
        gram = tuple(tuple(as_rat(x) for x in r) for r in rows)
        return cls(len(gram), gram)

    @classmethod
    def diagonal(cls, values) -> "SymmetricForm":
        vals = [as_rat(v) for v in values]
        n = len(vals)
        return cls(n, tuple(tuple(vals[i] if i == j else Fraction(0) for j in range(n)) for i in range(n)))

    def pair(self, u: Sequence, v: Sequence) -> Fraction:
        total = Fraction(0)
        for i, ui in enumerate(u):
            if ui:
                row = self.gram[i]
                total += ui * sum((row[j] * vj for j, vj in enumerate(v) if vj), Fraction(0))
        return total

    def congruent(self, P: Sequence[Sequence]) -> "SymmetricForm":
        """Return the form with Gram ``P G P^T`` (rows of ``P`` are new basis vectors)."""
        return SymmetricForm.from_rows([[self.pair(p, q) for q in P] for p in P])


@dataclass(frozen=True)
class DivisorClass:
    """Exact rational coordinate vector in a fixed (named) basis."""

    coords: tuple[Fraction, ...]

    @classmethod
    def of(cls, *values) -> "DivisorClass":
        if len(values) == 1 and not isinstance(values[0], (int, Fraction, str)):
            values = tuple(values[0])
        return cls(tuple(as_rat(v) for v in values))

    @classmethod
    def zero(cls, dim: int) -> "DivisorClass":
        return cls((Fraction(0),) * dim)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords, strict=True)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords, strict=True)))

    def __mul__(self, k) -> "DivisorClass":
        k = as_rat(k)
        return DivisorClass(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)


def signature(form: SymmetricForm) -> tuple[int, int, int]:
    """``(b_plus, b_minus, b_zero)`` by exact congruence diagonalisation."""
    n = form.dim
    a = [list(r) for r in form.gram]
    pos = neg = 0

    def swap(i, k):
        a[i], a[k] = a[k], a[i]
        for row in a:
            row[i], row[k] = row[k], row[i]

    for k in range(n):
        if a[k][k] == 0:
            i = next((i for i in range(k + 1, n) if a[i][i] != 0), None)
            if i is not None:
                swap(i, k)
            else:
                i = next((i for i in range(k + 1, n) if a[k][i] != 0), None)
                if i is None:
                    continue
                # e_k <- e_k + e_i gives a nonzero diagonal 2*a[k][i]
                for j in range(n):
                    a[k][j] += a[i][j]
                for row in a:
                    row[k] += row[i]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
                for row in a:
                    row[i] -= f * row[k]
    return pos, neg, n - pos - neg


def solve_rational(A: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve the square system ``A x = b`` exactly."""
    n = len(A)
    aug = [[as_rat(x) for x in row] + [as_rat(b[i])] for i, row in enumerate(A)]
    for k in range(n):
        piv = next((i for i in range(k, n) if aug[i][k] != 0), None)
        if piv is None:
            raise SingularSystem("linear system is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        p = aug[k][k]
        for i in range(n):
            if i != k and aug[i][k]:
                f = aug[i][k] / p
                for j in range(k, n + 1):
                    aug[i][j] -= f * aug[k][j]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    a = [[x % p for x in r] for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
    return r


# ---------------------------------------------------------------------------
# Number theory


def crt_smallest(congruences: Sequence[tuple[int, int]]) -> int:
    """Least nonnegative ``x`` with ``x = r (mod m)`` for every pair."""
    mods = [m for _, m in congruences]
    for i in range(len(mods)):
        for j in range(i + 1, len(mods)):
            if gcd(mods[i], mods[j]) != 1:
                raise NonCoprimeModuli(f"moduli {mods[i]} and {mods[j]} share a factor")
    x, mod = 0, 1
    for r, m in congruences:
        if m <= 0:
            raise ValueError("moduli must be positive")
        t = ((r - x) * pow(mod, -1, m)) % m if m > 1 else 0
        x += mod * t
        mod *= m
    return x % mod


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3317044064679887385961981  # bases above are exact below this bound


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= _MR_LIMIT:
        return bool(_sympy_isprime(n))
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_satisfying(start: int, predicate: Callable[[int], bool] = lambda p: True) -> int:
    n = max(start, 2)
    while not (is_prime(n) and predicate(n)):
        n += 1
    return n


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorint(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def ceil_sqrt(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1
