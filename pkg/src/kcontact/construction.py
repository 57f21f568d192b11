"""Replay of the explicit construction as integer and rational arithmetic.

Two copies of the rational elliptic surface with an ``I_9`` fibre are glued
along a smooth fibre.  We contract the (-2)-spheres ``D, D'`` and a chain of
17 (-2)-curves, attach multiplicities to the surfaces ``T_n, T'_m, A`` and
read off the homology of the Seifert bundle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Mapping, Sequence

from .cyclic import CyclicSingularity, HJChain, LocalAction, hj_eval
from .errors import InvalidParams, NotNegativeDefinite
from .lattice import (
    DivisorClass,
    IntMatrix,
    SymmetricForm,
    crt_smallest,
    next_prime_satisfying,
    signature,
    solve_rational,
)
from .seifert import (
    IsotropySurface,
    OrbifoldModel,
    SeifertBundle,
    SingularPoint,
    abelianized_orbifold_pi1,
)

# ---------------------------------------------------------------------------
# Monodromy


@dataclass(frozen=True)
class SL2Matrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant must be 1")

    @classmethod
    def identity(cls) -> "SL2Matrix":
        return cls(1, 0, 0, 1)

    def __matmul__(self, o: "SL2Matrix") -> "SL2Matrix":
        return SL2Matrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                         self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __pow__(self, k: int) -> "SL2Matrix":
        if k < 0:
            raise ValueError("negative powers are not supported")
        out, base = SL2Matrix.identity(), self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def trace(self) -> int:
        return self.a + self.d

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


def vanishing_matrix(p: int, q: int) -> SL2Matrix:
    """Dehn twist ``X_[p,q]`` along the cycle ``(p, q)``."""
    if p == 0 and q == 0:
        raise InvalidParams("vanishing cycle must be nonzero")
    return SL2Matrix(1 + p * q, -p * p, q * q, 1 - p * q)


MONODROMY_FACTORS = (("C", (1, 1), 1), ("X[1,-2]", (1, -2), 1), ("X[2,-1]", (2, -1), 1), ("A", (1, 0), 9))


def monodromy_product(factors=MONODROMY_FACTORS) -> SL2Matrix:
    out = SL2Matrix.identity()
    for _, (p, q), k in factors:
        out = out @ vanishing_matrix(p, q) ** k
    return out


def verify_monodromy() -> bool:
    """``C X_[1,-2] X_[2,-1] A^9 = I`` for the ``I_9 + 3 A_1`` fibration."""
    return monodromy_product() == SL2Matrix.identity()


# ---------------------------------------------------------------------------
# Surface bookkeeping


def gompf_bookkeeping(chi1: int, chi2: int, g_fiber: int) -> tuple[int, int]:
    """Euler characteristic and ``b2`` of a fibre sum of simply connected pieces."""
    chi = chi1 + chi2 - 2 * (2 - 2 * g_fiber)
    return chi, chi - 2


def glued_genus(g1: int, g2: int, d: int) -> int:
    """Genus after smoothing ``d`` transverse intersections of two surfaces."""
    return g1 + g2 + d - 1


def tn_invariants(n: int) -> tuple[int, int]:
    """``(genus, self-intersection)`` of ``T_n``; ``n = 0`` is the torus ``T``."""
    if n < 0:
        raise InvalidParams("n must be >= 0")
    return n * n + 1, 2 * n * n


Combo = Mapping[str, Fraction | int]


@dataclass
class CurveSystem:
    """Named curves with a symmetric intersection table and genera."""

    names: list[str] = field(default_factory=list)
    genus: dict[str, int] = field(default_factory=dict)
    _int: dict[tuple[str, str], int] = field(default_factory=dict)

    def add(self, name: str, self_int: int, genus: int = 0) -> None:
        if name in self.genus:
            raise ValueError(f"duplicate curve {name}")
        self.names.append(name)
        self.genus[name] = genus
        self._int[(name, name)] = self_int

    def meet(self, u: str, v: str, k: int = 1) -> None:
        self._int[(u, v)] = self._int[(v, u)] = k

    def dot(self, u: str, v: str) -> int:
        return self._int.get((u, v), 0)

    def pair(self, x: Combo, y: Combo) -> Fraction:
        return sum((Fraction(cx) * cy * self.dot(u, v) for u, cx in x.items() for v, cy in y.items()),
                   Fraction(0))

    def canonical_dot(self, x: Combo) -> Fraction:
        """``K . x`` by adjunction on each smooth component: ``K.C = 2g - 2 - C^2``."""
        return sum((Fraction(c) * (2 * self.genus[u] - 2 - self.dot(u, u)) for u, c in x.items()),
                   Fraction(0))

    def gram(self, names: Sequence[str]) -> list[list[int]]:
        return [[self.dot(u, v) for v in names] for u in names]


def fibre_sum_curve_system() -> CurveSystem:
    """The named curves in the fibre sum ``X``."""
    cs = CurveSystem()
    for side in ("", "'"):
        for i in range(1, 10):
            cs.add(f"C{i}{side}", -2)
        for i in range(1, 10):
            cs.meet(f"C{i}{side}", f"C{i % 9 + 1}{side}")
    for j, i in ((1, 1), (2, 4), (3, 7)):
        cs.add(f"E{j}", -2)
        cs.meet(f"E{j}", f"C{i}")
        cs.meet(f"E{j}", f"C{i}'")
    cs.add("F", 0, genus=1)
    for j in (1, 2, 3):
        cs.meet("F", f"E{j}")
    for side in ("", "'"):
        cs.add(f"D{side}", -2)
        cs.add(f"T{side}", 0, genus=1)
        cs.meet(f"D{side}", f"T{side}")
    return cs


CHAIN = tuple([f"C{i}" for i in range(8, 0, -1)] + ["E1"] + [f"C{i}'" for i in range(1, 9)])


def a_class(a: Sequence) -> dict[str, Fraction]:
    out = {"F": Fraction(2), "E1": Fraction(a[0])}
    for i in range(1, 9):
        out[f"C{i}"] = out[f"C{i}'"] = Fraction(a[i])
    return out


def a_square_formula(a: Sequence) -> Fraction:
    """Closed form ``A^2 = 4a_0 + sum 4a_{k-1}a_k - 2a_0^2 - sum 4a_k^2``."""
    return (4 * a[0] + sum(4 * a[k - 1] * a[k] for k in range(1, 9)) - 2 * a[0] ** 2
            - sum(4 * a[k] ** 2 for k in range(1, 9)))


@dataclass(frozen=True)
class ASolution:
    coeffs: tuple[Fraction, ...]
    A_sq: Fraction
    K_dot_A: Fraction
    genus: Fraction


def solve_A_system(cs: CurveSystem | None = None) -> ASolution:
    """Coefficients making ``2F + a_0 E_1 + sum a_i (C_i + C_i')`` orthogonal to the chain."""
    cs = cs or fibre_sum_curve_system()
    unknowns = [{"E1": 1}] + [{f"C{i}": 1, f"C{i}'": 1} for i in range(1, 9)]
    tests = ["E1"] + [f"C{i}" for i in range(1, 9)]
    matrix = [[cs.pair(u, {t: 1}) for u in unknowns] for t in tests]
    rhs = [-cs.pair({"F": 2}, {t: 1}) for t in tests]
    a = solve_rational(matrix, rhs)
    A = a_class(a)
    sq = cs.pair(A, A)
    k = cs.canonical_dot(A)
    return ASolution(tuple(a), sq, k, (k + sq) / 2 + 1)


def contract_chain_bookkeeping(chain, ambient_b2: int) -> tuple[CyclicSingularity, int]:
    chain = chain if isinstance(chain, HJChain) else HJChain.of(chain)
    d, r = hj_eval(chain)
    return CyclicSingularity(d, r), ambient_b2 - len(chain)


def mumford_pairing(cs: CurveSystem, classes: Sequence[Combo], contracted: Sequence[str]) -> SymmetricForm:
    """Rational intersection form of the images of ``classes`` after contracting ``contracted``."""
    pulled = pullbacks(cs, classes, contracted)
    return SymmetricForm.from_rows([[cs.pair(x, y) for y in pulled] for x in pulled])


def pullbacks(cs: CurveSystem, classes: Sequence[Combo], contracted: Sequence[str]) -> list[dict]:
    """``pi^* pi_* x = x + sum r_i C_i`` with the correction orthogonal to every ``C_i``."""
    contracted = list(contracted)
    out = []
    if not contracted:
        return [dict(x) for x in classes]
    gram = cs.gram(contracted)
    pos, neg, zero = signature(SymmetricForm.from_rows(gram))
    if neg != len(contracted):
        raise NotNegativeDefinite(f"contracted configuration has signature ({pos}, {neg}, {zero})")
    for x in classes:
        rhs = [-cs.pair(x, {c: 1}) for c in contracted]
        r = solve_rational(gram, rhs)
        y = {k: Fraction(v) for k, v in x.items()}
        for c, ri in zip(contracted, r):
            y[c] = y.get(c, Fraction(0)) + ri
        out.append(y)
    return out


# ---------------------------------------------------------------------------
# Primes and multiplicities


@dataclass(frozen=True)
class PrimeScheme:
    N: int
    p: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        flat = [q for row in self.p for q in row]
        if len(self.p) != self.N + 1 or any(len(r) != self.N + 1 for r in self.p):
            raise InvalidParams("prime array must be (N+1) x (N+1)")
        if len(set(flat)) != len(flat):
            raise InvalidParams("primes p_nm must be distinct")
        for n, row in enumerate(self.p):
            for m, q in enumerate(row):
                if q < 5 or q <= n or q <= m:
                    raise InvalidParams(f"p_{n}{m} = {q} violates p >= 5, p > n, p > m")


def build_prime_scheme(N: int) -> PrimeScheme:
    """Greedy: each ``p_nm`` (row-major) is the least unused prime ``>= max(5, n+1, m+1)``."""
    if N < 0:
        raise InvalidParams("N must be >= 0")
    used: set[int] = set()
    rows = []
    for n in range(N + 1):
        row = []
        for m in range(N + 1):
            q = next_prime_satisfying(max(5, n + 1, m + 1), lambda x: x not in used)
            used.add(q)
            row.append(q)
        rows.append(tuple(row))
    return PrimeScheme(N, tuple(rows))


def multiplicities(scheme: PrimeScheme) -> tuple[list[int], list[int], int]:
    N = scheme.N
    mT = []
    for n in range(N + 1):
        out = 1
        for m in range(N + 1):
            out *= scheme.p[n][m]
        mT.append(out)
    mTp = []
    for m in range(N + 1):
        out = 1
        for n in range(N + 1):
            out *= scheme.p[n][m] ** 2
        mTp.append(out)
    mA = 1
    for row in scheme.p:
        for q in row:
            mA *= q**3
    return mT, mTp, mA


def check_multiplicity_pattern(scheme: PrimeScheme) -> bool:
    mT, mTp, mA = multiplicities(scheme)
    ok = all(gcd(x, y) == 1 for x, y in combinations(mT, 2))
    ok &= all(gcd(x, y) == 1 for x, y in combinations(mTp, 2))
    ok &= all(gcd(x, y) > 1 for x in mT for y in mTp)
    ok &= all(gcd(x, mA) > 1 for x in mT + mTp)
    ok &= all(mT[n] % q == 0 and mTp[m] % q == 0
              for n, row in enumerate(scheme.p) for m, q in enumerate(row))
    return ok


# ---------------------------------------------------------------------------
# The orbifold X'


BASIS = ("Tbar", "Tbar'", "Abar")


def base_form(cs: CurveSystem | None = None) -> SymmetricForm:
    """Mumford pairing on ``Tbar, Tbar', Abar`` after contracting ``D, D'`` and the chain."""
    cs = cs or fibre_sum_curve_system()
    A = a_class(solve_A_system(cs).coeffs)
    return mumford_pairing(cs, [{"T": 1}, {"T'": 1}, A], ["D", "D'", *CHAIN])


@dataclass(frozen=True)
class Construction:
    N: int
    scheme: PrimeScheme
    model: OrbifoldModel
    bundle: SeifertBundle
    b0: int
    j0: int
    m_T: tuple[int, ...]
    m_Tp: tuple[int, ...]
    m_A: int


def _unit(x: int, coords: int, slot: int) -> DivisorClass:
    return DivisorClass.of(*[x if k == slot else 0 for k in range(coords)])


def choose_b0(mT: Sequence[int], mu: int, pair_T1: Sequence[int]) -> int:
    """Least ``b_0`` making ``<mu c1, T_1>`` prime to 6 and ``b_0`` a unit below ``m_T0``.

    ``pair_T1[n]`` is ``T_1 . T_n``; all ``b_n`` with ``n >= 1`` are 1.
    """
    m0 = mT[0]
    s = sum(pair_T1[n] * (mu // mT[n]) for n in range(1, len(mT)))
    unit = mu // m0
    # unit * b0 + s must be odd and nonzero mod 3; unit is prime to 6
    if unit % 2 == 0 or unit % 3 == 0:
        raise InvalidParams("mu / m_T0 must be prime to 6")
    bad3 = (-s * pow(unit, -1, 3)) % 3
    parity = (1 - s) * pow(unit, -1, 2) % 2
    bases = sorted(crt_smallest([(parity, 2), (r, 3)]) for r in range(3) if r != bad3)
    best = None
    for base in bases:
        b = base or 6
        while b < m0 and gcd(b, m0) != 1:
            b += 6
        if b < m0 and (best is None or b < best):
            best = b
    if best is None:
        raise InvalidParams(f"no admissible b_0 below m_T0 = {m0}")
    return best


def assemble_orbifold(N: int, scheme: PrimeScheme | None = None) -> Construction:
    scheme = scheme or build_prime_scheme(N)
    if scheme.N != N:
        raise InvalidParams("scheme size does not match N")
    mT, mTp, mA = multiplicities(scheme)
    form = base_form()
    dim = 3
    T1, T1p, Agen = _unit(2, dim, 0), _unit(2, dim, 1), _unit(1, dim, 2)
    classes_T = [_unit(1, dim, 0)] + [_unit(2 * n, dim, 0) for n in range(1, N + 1)]
    classes_Tp = [_unit(1, dim, 1)] + [_unit(2 * m, dim, 1) for m in range(1, N + 1)]
    pair_T1 = [form.pair(T1.coords, c.coords) for c in classes_T]
    mu = mA
    b0 = choose_b0(mT, mu, [int(x) for x in pair_T1])
    j0 = pow(b0, -1, mT[0])
    surfaces = []
    for n in range(N + 1):
        g, _ = tn_invariants(n)
        b, j = (b0, j0) if n == 0 else (1, 1)
        surfaces.append(IsotropySurface(f"T{n}", g, mT[n], j, b, classes_T[n]))
    for m in range(N + 1):
        g, _ = tn_invariants(m)
        surfaces.append(IsotropySurface(f"T'{m}", g, mTp[m], 1, 1, classes_Tp[m]))
    surfaces.append(IsotropySurface("A", int(solve_A_system().genus), mA, 1, 1, Agen))
    points = (
        SingularPoint("p", LocalAction(2, 1, 1), ("T0",)),
        SingularPoint("p'", LocalAction(2, 1, 1), ("T'0",)),
        SingularPoint("q", LocalAction(18, 1, 17), ()),
    )
    model = OrbifoldModel(
        b2=dim, intersection=form, b1_zero=True, surfaces=tuple(surfaces), points=points,
        canonical_class=DivisorClass.zero(dim), generators=(T1, T1p, Agen), basis=BASIS)
    bundle = SeifertBundle(model, DivisorClass.zero(dim))
    return Construction(N, scheme, model, bundle, b0, j0, tuple(mT), tuple(mTp), mA)


def surjectivity_witnesses(con: Construction) -> dict[int, tuple[int, int, int]]:
    """Image of ``(T_1, T_1', A)`` in ``Z_p^3`` for each ``p = p_nm``, read off the diagonal."""
    model = con.model
    out = {}
    for n, row in enumerate(con.scheme.p):
        for m, p in enumerate(row):
            tn, tm, a = model.surface(f"T{n}"), model.surface(f"T'{m}"), model.surface("A")
            g1, g2, g3 = model.generators
            out[p] = (int(model.pair(g1, tn.homology_class)) % p, int(model.pair(g2, tm.homology_class)) % p,
                      int(model.pair(g3, a.homology_class)) % p)
    return out


def expected_h2_orders(scheme: PrimeScheme) -> list[tuple[int, int]]:
    """Cyclic summands ``(order, count)`` of the predicted ``H_2(M)`` torsion."""
    out = []
    for n, row in enumerate(scheme.p):
        for m, p in enumerate(row):
            out += [(p, 2 * n * n + 2), (p * p, 2 * m * m + 2), (p**3, 20)]
    return out


# ---------------------------------------------------------------------------
# Orbifold fundamental group


def pi1_generators(N: int) -> list[str]:
    return ["a", "a'", "b", "gamma"] + [f"c{n}" for n in range(N + 1)] + [f"c'{n}" for n in range(N + 1)]


def pi1_relation_matrix(N: int, scheme: PrimeScheme | None = None,
                        isotropy_relations: bool = True) -> IntMatrix:
    """Abelianised relations of ``pi_1^orb(X')``; rows are relations.

    ``a, a'`` loop around ``p, p'``, ``b`` around ``q``, ``gamma`` around
    ``A`` and ``c_n, c'_n`` around ``T_n, T'_n``.  ``isotropy_relations``
    toggles the rows ``m_{T_n} c_n = 0``.
    """
    scheme = scheme or build_prime_scheme(N)
    mT, mTp, mA = multiplicities(scheme)
    gens = pi1_generators(N)
    idx = {g: i for i, g in enumerate(gens)}
    rows: list[list[int]] = []

    def rel_named(pairs):
        row = [0] * len(gens)
        for k, v in pairs:
            row[idx[k]] += v
        rows.append(row)

    rel_named([("a", 2)])
    rel_named([("a'", 2)])
    rel_named([("b", 18)])
    rel_named([("b", 9)])  # loop around E_1 is b^9 = [alpha, beta]
    rel_named([("b", 8)])  # E_2, E_3 give b^5 = b^13 and b^2 = b^16
    rel_named([("b", 14)])
    rel_named([("gamma", 18)])
    rel_named([("gamma", mA)])
    for side, ms, loop in (("c", mT, "a"), ("c'", mTp, "a'")):
        rel_named([(f"{side}0", 1), (loop, -2)])
        rel_named([(f"{side}{n}", n) for n in range(1, N + 1)] + [(loop, 1)])
        if isotropy_relations:
            for n in range(N + 1):
                rel_named([(f"{side}{n}", ms[n])])
    return IntMatrix.from_rows(rows, len(gens))


def pi1_abelianization(N: int, scheme: PrimeScheme | None = None, isotropy_relations: bool = True):
    return abelianized_orbifold_pi1(pi1_relation_matrix(N, scheme, isotropy_relations))
