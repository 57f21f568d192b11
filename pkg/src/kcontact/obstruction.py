"""Arithmetic side of the non-Sasakian obstruction.

Orbifold Euler bounds, canonical-class coefficients in an orthogonal curve
basis, the chain of universal constants ``T_0 .. T_8`` and the resulting
``N``, the Diophantine family for ``x^2 + 8 q y^2 = z^2`` and the quotient
windows used to force ``m_1 = n^2``.  Irrational quantities are handled by
exact squaring or by certified enclosures from :mod:`kcontact.enclosure`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd, isqrt
from typing import Iterable, Sequence

from . import enclosure as enc
from .errors import EffectivityViolation, IncompleteLedger, InvalidParams
from .lattice import as_rat, ceil_sqrt, divisors, is_prime, next_prime_satisfying

R_DEFAULT = 4 * 5 * 7 * 11 * 13 * 17
EPS_DEFAULT = Fraction(1, 10)
# genus triples {g_n, g_n', 10} for n = 1,2 / 4,5 / 6,7
T0_TRIPLES = ((2, 5, 10), (17, 26, 10), (37, 50, 10))


# ---------------------------------------------------------------------------
# Euler characteristic bounds


def orbifold_euler_complement(genus: Sequence[int], residual_points: Iterable[int] = ()) -> Fraction:
    """``e_orb(Y - (D_1 u D_2 u D_3))`` for ``b2 = 3``, ``chi(Y) = 5``."""
    if len(genus) != 3:
        raise InvalidParams("need three genus values")
    out = Fraction(5) - sum(2 - 2 * g for g in genus)
    for d in residual_points:
        if d < 2:
            raise InvalidParams("point orders must be >= 2")
        out -= 1 - Fraction(1, d)
    return out


def residual_point_bound(genus: Sequence[int]) -> int:
    """``2(2g_1 + 2g_2 + 2g_3 - 1)``: most points off the curves allowed by nonnegativity."""
    return 2 * (2 * sum(genus) - 1)


def compute_T0(genus_triples: Sequence[Sequence[int]] = T0_TRIPLES) -> int:
    if len(genus_triples) != 3:
        raise InvalidParams("T0 uses exactly three genus triples")
    return sum(residual_point_bound(t) for t in genus_triples)


# ---------------------------------------------------------------------------
# Orthogonal curve bases


@dataclass(frozen=True)
class CurveRecord:
    genus: int
    self_int: Fraction
    points: tuple[int, ...] = ()  # orders d_p of singular points on the curve

    def __post_init__(self):
        if self.genus < 1:
            raise InvalidParams("basis curves have genus >= 1")
        if self.self_int == 0:
            raise InvalidParams("basis curves have nonzero square")

    @property
    def good(self) -> bool:
        return not self.points

    @property
    def chi(self) -> Fraction:
        return 2 * self.genus - 2 + sum((1 - Fraction(1, d) for d in self.points), Fraction(0))

    @property
    def m(self) -> Fraction:
        return abs(Fraction(self.self_int))


@dataclass(frozen=True)
class BasisCandidate:
    """Three disjoint curves spanning ``H_2(Y, Q)``; ``curves[0]`` is the positive one."""

    curves: tuple[CurveRecord, CurveRecord, CurveRecord]

    def __post_init__(self):
        signs = [c.self_int > 0 for c in self.curves]
        if signs != [True, False, False]:
            raise InvalidParams("exactly one curve (listed first) must have positive square")

    @classmethod
    def of(cls, genus: Sequence[int], m: Sequence, points: Sequence[Sequence[int]] = ((), (), ())):
        m1, m2, m3 = (as_rat(x) for x in m)
        return cls((CurveRecord(genus[0], m1, tuple(points[0])),
                    CurveRecord(genus[1], -m2, tuple(points[1])),
                    CurveRecord(genus[2], -m3, tuple(points[2]))))

    @property
    def good(self) -> bool:
        return all(c.good for c in self.curves)


def canonical_coeffs(basis: BasisCandidate, check: bool = True) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients of ``K = sum a_i D_i`` from orbifold adjunction."""
    c1, c2, c3 = basis.curves
    if check and c1.m >= c1.chi:
        raise EffectivityViolation(f"m1 = {c1.m} >= chi1 = {c1.chi}")
    return ((c1.chi - c1.m) / c1.m, -(c2.chi + c2.m) / c2.m, -(c3.chi + c3.m) / c3.m)


def k_squared(basis: BasisCandidate) -> Fraction:
    c1, c2, c3 = basis.curves
    return ((c1.chi - c1.m) ** 2 / c1.m - (c2.chi + c2.m) ** 2 / c2.m - (c3.chi + c3.m) ** 2 / c3.m)


# ---------------------------------------------------------------------------
# Prime sequences


def s_a_sequence(start: int, count: int) -> list[int]:
    """Primes ``n_1 >= start`` with ``n_{i+1}`` the least prime above ``max(2 n_i^2, sqrt6 n_i)``."""
    if count < 1:
        raise InvalidParams("count must be >= 1")
    out = [next_prime_satisfying(start)]
    while len(out) < count:
        n = out[-1]
        bound = max(2 * n * n, ceil_sqrt(6 * n * n))
        out.append(next_prime_satisfying(bound + 1))
    return out


# ---------------------------------------------------------------------------
# Certified helpers


def _ceil_certified(make, bits: int = 96, max_bits: int = 4096) -> tuple[int, enc.Interval]:
    """``ceil`` of a quantity known through enclosures ``make(bits)``; refine until unambiguous."""
    while True:
        iv = make(bits)
        if ceil(iv.lo) == ceil(iv.hi):
            return ceil(iv.lo), iv
        if bits >= max_bits:
            raise InvalidParams("could not separate the value from an integer")
        bits *= 2


def t7_interval(T7_sq: Fraction, bits: int = enc.DEFAULT_BITS) -> enc.Interval:
    return enc.sqrt_rational(Fraction(T7_sq), bits)


def t8_interval(T7_sq: Fraction, eps: Fraction, bits: int = enc.DEFAULT_BITS) -> enc.Interval:
    """``48 (T_7 - 1) / eps^2``."""
    eps = as_rat(eps)
    return (t7_interval(T7_sq, bits) - 1) * Fraction(48) / (eps * eps)


@dataclass(frozen=True)
class PackingBound:
    count: int
    enclosure: enc.Interval
    approximation: enc.Interval

    def ratio(self) -> enc.Interval:
        return self.enclosure / self.approximation


def packing_count_bound(T7_sq, eps, bits: int = 96) -> PackingBound:
    """``ceil(6 (T_7 - 1) / (cosh(eps/2) - 1))``.

    The small-eps approximation ``48 (T_7 - 1) / eps^2`` is returned alongside.

    ``T7_sq`` is ``T_7^2``; pass ``4`` for ``T_7 = 2``.
    """
    T7_sq, eps = as_rat(T7_sq), as_rat(eps)
    if T7_sq <= 1 or eps <= 0:
        raise InvalidParams("need T7 > 1 and eps > 0")

    def make(b):
        return (t7_interval(T7_sq, b) - 1) * 6 / enc.cosh_minus_one(eps / 2, b)

    count, iv = _ceil_certified(make, bits)
    return PackingBound(count, iv, t8_interval(T7_sq, eps, bits))


@dataclass(frozen=True)
class CapCheck:
    R: enc.Interval
    lhs: enc.Interval  # 2 pi (cosh R - 1)
    rhs: enc.Interval  # 4 pi sinh^2(R/2)
    area: enc.Interval  # 2 pi (T7 - 1)

    @property
    def consistent(self) -> bool:
        return self.lhs.overlaps(self.rhs) and self.lhs.overlaps(self.area) and self.rhs.overlaps(self.area)

    @property
    def width(self) -> Fraction:
        return max(self.lhs.width, self.rhs.width)


def hyperbolic_cap_check(T7_sq, bits: int = 192) -> CapCheck:
    """Area of ``{x <= T_7}`` on the hyperboloid, computed two ways from ``R = arccosh T_7``."""
    T7 = t7_interval(as_rat(T7_sq), bits)
    R = enc.arccosh(T7, bits)
    pi = enc.pi(bits)
    lhs = 2 * pi * (enc.cosh(R, bits) - 1)
    rhs = 4 * pi * enc.sinh(R / 2, bits).square()
    return CapCheck(R, lhs, rhs, 2 * pi * (T7 - 1))


# ---------------------------------------------------------------------------
# Constants ledger


@dataclass(frozen=True)
class LedgerEntry:
    name: str
    value: object
    formula: str
    origin: str  # "forced" (follows from the formulas), "input", or "artifact-default"


def _kmax(T4: int) -> Fraction:
    """``max (18 + m)^2 / m`` over integers ``1 <= m <= 20 + T4`` (convex, so an endpoint)."""
    top = 20 + T4
    return max(Fraction((18 + 1) ** 2, 1), Fraction((18 + top) ** 2, top))


def t7_squared(T1: int, T4: int, g_a: int) -> Fraction:
    first = T1 + Fraction((4 * g_a - 2 + T4) ** 2, 2 * g_a + T4) - Fraction((38 + T4) ** 2, 20 + T4)
    return max(first, Fraction((2 * g_a - 1) ** 2), Fraction(17**2))


def k2_threshold(T4: int) -> tuple[Fraction, int]:
    """Bound ``(2 + T4) + max (18+m3)^2/m3`` and the least ``n`` with ``n^2`` above it."""
    bound = (2 + T4) + _kmax(T4)
    n = isqrt(floor(bound))
    while n * n <= bound:
        n += 1
    return bound, n


@dataclass
class ConstantsLedger:
    T0: int
    N0: int
    N_of_1: int
    g_a: int
    R: int
    eps: Fraction
    T1: int
    T2: int
    T3: int
    T4: int
    T5: Fraction
    T6: Fraction
    T7_sq: Fraction
    T8: enc.Interval
    n0: int
    k2_bound: Fraction
    k2_n: int
    N_leq: int
    N_gt: int
    N_final: int
    entries: list[LedgerEntry] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {e.name: {"value": e.value, "formula": e.formula, "origin": e.origin} for e in self.entries}


def constants_pipeline(N_of_1: int | None = None, T0: int | None = None, eps=EPS_DEFAULT,
                       g_a: int | None = None, T5=None, N_leq: int | None = None,
                       R: int = R_DEFAULT) -> ConstantsLedger:
    eps = as_rat(eps)
    if not 0 < eps <= 1:
        raise InvalidParams("eps must lie in (0, 1]")
    entries: list[LedgerEntry] = []

    def rec(name, value, formula, origin="forced"):
        entries.append(LedgerEntry(name, value, formula, origin))
        return value

    if T0 is None:
        T0 = rec("T0", compute_T0(), "sum of 2(2g1+2g2+2g3-1) over genus triples "
                 f"{list(T0_TRIPLES)}", "artifact-default")
    else:
        rec("T0", T0, "supplied", "input")
    N0 = rec("N0", 4 * T0 + 1, "4*T0 + 1")
    if N_of_1 is None:
        N_of_1 = rec("N_of_1", s_a_sequence(N0 + 1, 1)[-1], "least prime > N0 (sets S_a of size 1)",
                     "artifact-default")
    else:
        rec("N_of_1", N_of_1, "supplied", "input")
    if g_a is None:
        g_a = rec("g_a", N0 * N0 + 1, "N0^2 + 1 (largest genus g_a = a^2 + 1 with a <= N0)",
                  "artifact-default")
    else:
        rec("g_a", g_a, "supplied", "input")
    rec("R", R, "4*5*7*11*13*17", "forced" if R == R_DEFAULT else "input")
    rec("eps", eps, "packing radius", "artifact-default" if eps == EPS_DEFAULT else "input")
    T1 = rec("T1", (2 * N_of_1 - 1) ** 2, "(2*N(1) - 1)^2")
    T2 = rec("T2", 4 * N_of_1 - 4, "4*N(1) - 4")
    T3 = rec("T3", 12 + T2, "12 + T2")
    T4 = rec("T4", 4 * T3 - 14, "4*T3 - 14")
    T6 = rec("T6", T1 + (2 + T4) + _kmax(T4), "T1 + (2 + T4) + max_{1<=m3<=20+T4} (18+m3)^2/m3",
             "artifact-default")
    if T5 is None:
        T5 = rec("T5", T6, "same closed form as T6", "artifact-default")
    else:
        T5 = as_rat(T5)
        rec("T5", T5, "supplied", "input")
    n0 = 1
    while 8 * n0 * n0 <= T5 + T2:
        n0 += 1
    rec("n0", n0, "least n with 8 n^2 > T5 + T2")
    T7_sq = rec("T7_sq", t7_squared(T1, T4, g_a),
                "max(T1 + (4g_a-2+T4)^2/(2g_a+T4) - (38+T4)^2/(20+T4), (2g_a-1)^2, 17^2)")
    N_gt, T8 = _ceil_certified(lambda b: t8_interval(T7_sq, eps, b))
    N_gt += 1
    rec("T8", T8, "48 (T7 - 1) / eps^2 (certified enclosure)")
    rec("N_gt", N_gt, "ceil(T8) + 1")
    k2_bound, k2_n = k2_threshold(T4)
    rec("k2_threshold", k2_n, "least n with n^2 > (2 + T4) + max (18+m3)^2/m3")
    if N_leq is None:
        N_leq = rec("N_leq", max(n0, k2_n), "max(n0, k2_threshold)", "artifact-default")
    else:
        rec("N_leq", N_leq, "supplied", "input")
    N_final = rec("N_final", max(N_leq, N_gt), "max(N_leq, N_gt)")
    return ConstantsLedger(T0, N0, N_of_1, g_a, R, eps, T1, T2, T3, T4, T5, T6, T7_sq, T8, n0,
                           k2_bound, k2_n, N_leq, N_gt, N_final, entries)


@dataclass(frozen=True)
class K2Verdict:
    n: int
    n_prime: int
    bound: Fraction
    threshold: int
    k2_lower: Fraction
    positive: bool


def eliminate_k2_nonpositive(n: int, n_prime: int, ledger: ConstantsLedger | None) -> K2Verdict:
    """With ``m_1 = n^2`` forced, ``K^2 = n^2 - m_2 - (18+m_3)^2/m_3`` is positive past the threshold."""
    if ledger is None or getattr(ledger, "T4", None) is None:
        raise IncompleteLedger("T4 is needed to bound m2 and m3")
    bound, thr = k2_threshold(ledger.T4)
    low = min(n, n_prime)
    k2 = Fraction(low * low) - bound
    return K2Verdict(n, n_prime, bound, thr, k2, k2 > 0)


def k2_at_forced_m1(n: int, m2, m3) -> Fraction:
    """``(2n^2 - m_1)^2 / m_1 - m_2 - (18 + m_3)^2 / m_3`` at ``m_1 = n^2``."""
    m1 = Fraction(n * n)
    m2, m3 = as_rat(m2), as_rat(m3)
    return (2 * n * n - m1) ** 2 / m1 - m2 - (18 + m3) ** 2 / m3


# ---------------------------------------------------------------------------
# x^2 + 8 q y^2 = z^2


def diophantine_family(q: int, d: int, lam: int, mu: int, s: int) -> tuple[int, int, int]:
    if q < 1:
        raise InvalidParams("q must be positive")
    if s == 0 or (2 * q) % s:
        raise InvalidParams(f"s = {s} must divide 2q = {2 * q}")
    if gcd(lam, mu) != 1:
        raise InvalidParams(f"gcd(lam, mu) = {gcd(lam, mu)} must be 1")
    u = 2 * q * lam * lam // s
    return d * (u - s * mu * mu), d * lam * mu, d * (u + s * mu * mu)


def _signed_divisors(n: int) -> list[int]:
    ds = divisors(abs(n))
    return ds + [-x for x in ds]


def _sign_closure(triples: Iterable[tuple[int, int, int]]) -> set[tuple[int, int, int]]:
    out = set()
    for x, y, z in triples:
        for sx in (1, -1):
            for sy in (1, -1):
                for sz in (1, -1):
                    out.add((sx * x, sy * y, sz * z))
    return out


def family_solutions(q: int, ymax: int, zmax: int | None = None) -> set[tuple[int, int, int]]:
    """All family outputs with ``1 <= |y| <= ymax`` (and ``y = 0``, ``|z| <= zmax`` if given)."""
    out = []
    for y in range(1, ymax + 1):
        for d in divisors(y):
            rest = y // d
            for lam in divisors(rest):
                mu = rest // lam
                if gcd(lam, mu) != 1:
                    continue
                for s in _signed_divisors(2 * q):
                    out.append(diophantine_family(q, d, lam, mu, s))
    if zmax is not None:
        for s in _signed_divisors(2 * q):
            for lam, mu in ((1, 0), (0, 1)):
                base = diophantine_family(q, 1, lam, mu, s)
                if base[2] == 0:
                    continue
                for d in range(0, zmax // abs(base[2]) + 1):
                    out.append(tuple(d * v for v in base))
    return _sign_closure(out)


def brute_force_solutions(q: int, ymax: int, zmax: int | None = None) -> set[tuple[int, int, int]]:
    """Exhaustive scan; for ``y != 0`` the bound ``|x| < 4 q y^2`` follows from ``(z-x)(z+x) = 8qy^2``."""
    import numpy as np

    out = set()
    for y in range(1, ymax + 1):
        c = 8 * q * y * y
        xs = np.arange(0, c // 2 + 1, dtype=np.int64)
        vals = xs * xs + c
        roots = np.floor(np.sqrt(vals.astype(np.float64))).astype(np.int64)
        hits = []
        for delta in (-1, 0, 1):
            r = roots + delta
            hits.append(np.nonzero(r * r == vals)[0])
        for x in sorted(set(np.concatenate(hits).tolist())):
            z = isqrt(x * x + c)
            if z * z == x * x + c:  # exact confirmation
                out.add((int(x), y, z))
    if zmax is not None:
        for z in range(0, zmax + 1):
            out.add((z, 0, z))
    return _sign_closure(out)


@dataclass(frozen=True)
class CompletenessRow:
    q: int
    ymax: int
    brute: int
    family: int
    missing: int
    extra: int

    @property
    def ok(self) -> bool:
        return self.missing == 0 and self.extra == 0


def completeness_check(q: int, ymax: int, zmax: int = 200) -> CompletenessRow:
    brute = brute_force_solutions(q, ymax, zmax)
    fam = {t for t in family_solutions(q, ymax, zmax) if abs(t[1]) <= ymax and (t[1] or abs(t[2]) <= zmax)}
    for x, y, z in fam:
        if x * x + 8 * q * y * y != z * z:  # pragma: no cover - would be an algebra bug
            raise AssertionError((q, x, y, z))
    return CompletenessRow(q, ymax, len(brute), len(fam), len(brute - fam), len(fam - brute))


# ---------------------------------------------------------------------------
# Quotients m1 / m1'


def admissible_quotients(n: int, n_prime: int, R: int = R_DEFAULT) -> set[Fraction]:
    """``{(d_i/d_j) n^beta / n'^gamma : d_i, d_j | 4R, beta, gamma in {0,1,2}}``."""
    if not (is_prime(n) and is_prime(n_prime)):
        raise InvalidParams("n and n' must be prime")
    ds = divisors(4 * R)
    ratios = {Fraction(a, b) for a in ds for b in ds}
    powers = {Fraction(n**b, n_prime**c) for b in range(3) for c in range(3)}
    return {r * p for r in ratios for p in powers}


def structured_quotients(n: int, n_prime: int, R: int = R_DEFAULT) -> set[Fraction]:
    """Quotients ``a / a'`` with ``a in {d_i, d_i n, n^2}`` and ``a' in {d_j, d_j n', n'^2}``."""
    ds = divisors(4 * R)
    top = set(ds) | {d * n for d in ds} | {n * n}
    bottom = set(ds) | {d * n_prime for d in ds} | {n_prime * n_prime}
    return {Fraction(a, b) for a in top for b in bottom}


def window_intruders(values: Iterable[Fraction], n: int, n_prime: int, eps) -> list[Fraction]:
    """Elements other than ``n^2/n'^2`` inside ``((1-eps) n^2/n'^2, (1+eps) n^2/n'^2)``."""
    eps = as_rat(eps)
    target = Fraction(n * n, n_prime * n_prime)
    lo, hi = (1 - eps) * target, (1 + eps) * target
    return sorted(v for v in values if lo < v < hi and v != target)


@dataclass(frozen=True)
class Surd:
    """``a + b * sqrt(c)`` with rational ``a, b`` and ``c >= 0``; compared exactly."""

    a: Fraction
    b: Fraction
    c: Fraction

    def sign_minus(self, x) -> int:
        """Sign of ``self - x``."""
        u = self.a - as_rat(x)  # sign of u + b sqrt(c)
        su = (u > 0) - (u < 0)
        sv = (self.b > 0) - (self.b < 0) if self.c else 0
        if sv == 0 or su == sv:
            return su
        if su == 0:
            return sv
        u2, v2 = u * u, self.b * self.b * self.c
        return su if u2 > v2 else sv if u2 < v2 else 0

    def __le__(self, x) -> bool:
        return self.sign_minus(x) <= 0

    def __ge__(self, x) -> bool:
        return self.sign_minus(x) >= 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * float(self.c) ** 0.5


@dataclass(frozen=True)
class M1Interval:
    lo: Surd
    hi: Fraction
    relaxed_lo: Surd

    def contains(self, m) -> bool:
        return self.lo <= m and as_rat(m) <= self.hi

    def relaxed_contains(self, m) -> bool:
        return self.relaxed_lo <= m and as_rat(m) <= self.hi


def m1_interval(n: int, T6) -> M1Interval:
    """Range of ``m_1`` allowed by ``(2n^2 - m_1)^2 / m_1 <= T_6``."""
    T6 = as_rat(T6)
    if T6 < 0:
        raise InvalidParams("T6 must be nonnegative")
    top = Fraction(2 * n * n)
    lo = Surd(top + T6 / 2, Fraction(-1), 2 * n * n * T6 + T6 * T6 / 4)
    relaxed = Surd(top, Fraction(-n), 2 * T6)
    return M1Interval(lo, top, relaxed)


def separated_primes(eps=EPS_DEFAULT, R: int = R_DEFAULT) -> tuple[int, int]:
    """A pair ``n' < n`` for which no structured quotient except ``n^2/n'^2`` enters the window.

    Both lower sides of the window need the factor ``1/(1 - eps)``:
    ``n' > max(d)/(1 - eps)`` and ``n > max(d) n'^2/(1 - eps)``.
    """
    eps = as_rat(eps)
    top = max(divisors(4 * R))
    small = next_prime_satisfying(floor(top / (1 - eps)) + 1)
    big = next_prime_satisfying(floor(top * small * small / (1 - eps)) + 1)
    return small, big
