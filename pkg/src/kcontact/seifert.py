"""Seifert circle bundles over cyclic 4-orbifolds.

The base is described by a rational basis of ``H^2(X, Q)`` with its
intersection form, isotropy surfaces ``D_i`` (genus, multiplicity, local
invariant) and isolated singular points.  From that we compute the Chern
class, the three conditions for ``H_1(M) = 0``, ``H_2(M)``, the spin
condition and the Smale-Barden name of ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from sympy import primefactors

from .cyclic import LocalAction, reduce_action
from .errors import (
    BasisNotIntegral,
    H1NotZero,
    IncompatibleMultiplicities,
    InvalidParams,
    InvariantViolation,
    MissingW2Data,
    NotRealizable,
)
from .lattice import (
    DivisorClass,
    FiniteAbelianGroup,
    IntMatrix,
    SymmetricForm,
    cokernel,
    lcm,
    rank_mod_p,
)


@dataclass(frozen=True)
class IsotropySurface:
    label: str
    genus: int
    m: int
    j: int
    b: int
    homology_class: DivisorClass

    def __post_init__(self):
        if self.genus < 0:
            raise InvariantViolation(f"surface {self.label}: genus must be >= 0", field=self.label)
        if self.m < 2:
            raise InvariantViolation(f"surface {self.label}: multiplicity must be >= 2", field=self.label)
        if gcd(self.j, self.m) != 1:
            raise InvariantViolation(
                f"surface {self.label}: gcd(j, m) = {gcd(self.j, self.m)}",
                rule="local invariant j is a unit mod m", field=self.label)
        if not 0 < self.b < self.m or (self.j * self.b) % self.m != 1 % self.m:
            raise InvariantViolation(
                f"surface {self.label}: need 0 < b < m and j*b = 1 mod m",
                rule="0 < b_i < m_i with j_i b_i = 1 (mod m_i)", field=self.label)


@dataclass(frozen=True)
class SingularPoint:
    """Isolated point of ``X``; ``action`` is the cyclic singularity it carries."""

    label: str
    action: LocalAction
    incident_surfaces: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.incident_surfaces) > 2:
            raise InvariantViolation(f"point {self.label}: at most two surfaces may meet at a point",
                                     field=self.label)
        if reduce_action(self.action).d <= 1:
            raise InvariantViolation(f"point {self.label}: d = 1 is a smooth point",
                                     rule="a point is singular iff d > 1", field=self.label)

    @property
    def d(self) -> int:
        return reduce_action(self.action).d


@dataclass(frozen=True)
class OrbifoldModel:
    """Base orbifold.  ``generators`` are declared integral classes of ``H^2(X, Z)``."""

    b2: int
    intersection: SymmetricForm
    b1_zero: bool
    surfaces: tuple[IsotropySurface, ...] = ()
    points: tuple[SingularPoint, ...] = ()
    canonical_class: DivisorClass | None = None
    w2_zero: bool | None = None
    generators: tuple[DivisorClass, ...] = ()
    basis: tuple[str, ...] = ()

    def __post_init__(self):
        if self.intersection.dim != self.b2:
            raise InvariantViolation(f"intersection form has dim {self.intersection.dim}, b2 = {self.b2}",
                                     field="gram")
        if self.basis and len(self.basis) != self.b2:
            raise InvariantViolation("basis names must match b2", field="basis")
        labels = [s.label for s in self.surfaces]
        if len(set(labels)) != len(labels):
            raise InvariantViolation("duplicate surface label", field="surfaces")
        for s in self.surfaces:
            if len(s.homology_class) != self.b2:
                raise InvariantViolation(f"surface {s.label}: class has wrong dimension", field=s.label)
        for i, s in enumerate(self.surfaces):
            for t in self.surfaces[i + 1:]:
                if gcd(s.m, t.m) > 1 and self.pair(s.homology_class, t.homology_class) != 0:
                    raise InvariantViolation(
                        f"surfaces {s.label}, {t.label} share a prime in their multiplicities but meet",
                        rule="gcd(m_i, m_j) = 1 whenever D_i and D_j intersect",
                        field=f"{s.label},{t.label}")
        known = set(labels)
        for p in self.points:
            for lab in p.incident_surfaces:
                if lab not in known:
                    raise InvariantViolation(f"point {p.label}: unknown surface {lab}", field=p.label)
            ms = [self.surface(lab).m for lab in p.incident_surfaces]
            if len(ms) == 2 and gcd(*ms) != 1:
                raise IncompatibleMultiplicities(
                    f"point {p.label}: incident multiplicities {ms} are not coprime", field=p.label)
        for cls in (self.canonical_class, *self.generators):
            if cls is not None and len(cls) != self.b2:
                raise InvariantViolation("class has wrong dimension", field="generators")

    def pair(self, u: DivisorClass, v: DivisorClass) -> Fraction:
        return self.intersection.pair(u.coords, v.coords)

    def surface(self, label: str) -> IsotropySurface:
        for s in self.surfaces:
            if s.label == label:
                return s
        raise KeyError(label)

    def point(self, label: str) -> SingularPoint:
        for p in self.points:
            if p.label == label:
                return p
        raise KeyError(label)


def point_multiplicity(model: OrbifoldModel, point_label: str) -> int:
    """``m_x = d_x * prod m_i`` over the surfaces through ``x``."""
    pt = model.point(point_label)
    ms = [model.surface(lab).m for lab in pt.incident_surfaces]
    for i in range(len(ms)):
        for k in range(i):
            if gcd(ms[i], ms[k]) != 1:
                raise IncompatibleMultiplicities(f"point {point_label}: multiplicities {ms} not coprime")
    out = pt.d
    for m in ms:
        out *= m
    return out


@dataclass
class SeifertBundle:
    base: OrbifoldModel
    background: DivisorClass | None = None
    chern: DivisorClass = field(init=False)
    ell: int = field(init=False)
    mu: int = field(init=False)

    def __post_init__(self):
        if self.background is None:
            self.background = DivisorClass.zero(self.base.b2)
        if len(self.background) != self.base.b2:
            raise InvariantViolation("background class has wrong dimension", field="background_class")
        self.chern = chern_class(self)
        surf = [s.m for s in self.base.surfaces]
        self.mu = lcm(*surf) if surf else 1
        pts = [point_multiplicity(self.base, p.label) for p in self.base.points]
        self.ell = lcm(*(surf + pts)) if surf or pts else 1


def chern_class(bundle: SeifertBundle) -> DivisorClass:
    """``c1 = c1(B) + sum (b_i / m_i) [D_i]``."""
    out = bundle.background if bundle.background is not None else DivisorClass.zero(bundle.base.b2)
    for s in bundle.base.surfaces:
        out = out + s.homology_class * Fraction(s.b, s.m)
    return out


@dataclass(frozen=True)
class H1Report:
    cond1: bool
    cond2: bool
    cond3: bool
    cond2_witness: int | None
    cond2_snf: bool
    cond3_gcd: int
    pairings: tuple[tuple[int, ...], ...]
    mu_c1_pairings: tuple[int, ...]
    primes: tuple[int, ...]

    @property
    def all_true(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3

    def to_dict(self) -> dict:
        return {
            "cond1_b1_zero": self.cond1,
            "cond2_surjective": self.cond2,
            "cond2_witness_prime": self.cond2_witness,
            "cond2_snf_agrees": self.cond2_snf == self.cond2,
            "cond3_primitive": self.cond3,
            "cond3_gcd": self.cond3_gcd,
            "generator_surface_pairings": [list(r) for r in self.pairings],
            "mu_c1_pairings": list(self.mu_c1_pairings),
        }


def _integral(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise BasisNotIntegral(f"{what} = {x} is not an integer")
    return x.numerator


def generator_pairings(model: OrbifoldModel) -> list[list[int]]:
    """Integer matrix ``<g_k, D_i>`` (rows: generators, columns: surfaces)."""
    for k, g in enumerate(model.generators):
        if not g.is_integral:
            raise BasisNotIntegral(f"generator {k} has non-integral coordinates", field="generators")
    return [[_integral(model.pair(g, s.homology_class), f"<g{k}, {s.label}>") for s in model.surfaces]
            for k, g in enumerate(model.generators)]


def surjectivity_by_snf(pairings: Sequence[Sequence[int]], ms: Sequence[int]) -> bool:
    """``Z^k -> sum Z_{m_i}`` is onto iff the quotient by image and ``m_i`` vanishes."""
    s = len(ms)
    if s == 0:
        return True
    rows = [list(r) for r in pairings] + [[m if i == k else 0 for i in range(s)] for k, m in enumerate(ms)]
    return cokernel(IntMatrix.from_rows(rows, s)).is_trivial


def h1_vanishing_report(bundle: SeifertBundle) -> H1Report:
    model = bundle.base
    pairings = generator_pairings(model)
    ms = [s.m for s in model.surfaces]
    primes = sorted({p for m in ms for p in primefactors(m)})
    witness = None
    for p in primes:
        cols = [i for i, m in enumerate(ms) if m % p == 0]
        sub = [[row[i] for i in cols] for row in pairings]
        if rank_mod_p(sub, p) < len(cols):
            witness = p
            break
    cond2 = witness is None
    snf = surjectivity_by_snf(pairings, ms)
    if snf != cond2:  # pragma: no cover - would indicate a bug in one of the two checks
        raise InvariantViolation("per-prime and SNF surjectivity checks disagree")
    x = bundle.chern * bundle.mu
    xs = [_integral(model.pair(x, g), f"<mu c1, g{k}>") for k, g in enumerate(model.generators)]
    g = 0
    for v in xs:
        g = gcd(g, v)
    return H1Report(
        cond1=bool(model.b1_zero), cond2=cond2, cond3=g == 1, cond2_witness=witness, cond2_snf=snf,
        cond3_gcd=g, pairings=tuple(tuple(r) for r in pairings), mu_c1_pairings=tuple(xs),
        primes=tuple(primes))


def h2_total_space(bundle: SeifertBundle, report: H1Report | None = None) -> FiniteAbelianGroup:
    """``Z^(b2-1) + sum Z_{m_i}^(2 g_i)``, valid once ``H_1(M) = 0``."""
    report = report or h1_vanishing_report(bundle)
    if not report.all_true:
        failed = [n for n, ok in (("cond1", report.cond1), ("cond2", report.cond2),
                                  ("cond3", report.cond3)) if not ok]
        raise H1NotZero(f"H_1(M) may be nonzero: {', '.join(failed)} failed")
    base = bundle.base
    return FiniteAbelianGroup.from_cyclic_orders(
        [(s.m, 2 * s.genus) for s in base.surfaces], free_rank=base.b2 - 1)


def _mod2_vector(model: OrbifoldModel, cls: DivisorClass) -> tuple[int, ...]:
    return tuple(_integral(model.pair(cls, g), "mod-2 pairing") % 2 for g in model.generators)


def spin_check(bundle: SeifertBundle) -> bool:
    """Whether ``w2(M) = 0``.

    Classes are reduced mod 2 through their pairings with the integral
    generators; the pulled-back class dies iff it lies in the span of
    ``ell * c1`` mod 2.
    """
    model = bundle.base
    if model.w2_zero:
        w2 = (0,) * len(model.generators)
    elif model.canonical_class is not None:
        w2 = _mod2_vector(model, model.canonical_class)
    else:
        raise MissingW2Data("no w2 data for the base")
    residual = list(w2)
    for s in model.surfaces:
        if (s.m - 1) % 2:
            for k, v in enumerate(_mod2_vector(model, s.homology_class)):
                residual[k] ^= v
    if not any(residual):
        return True
    fiber = bundle.chern * bundle.ell
    if not fiber.is_integral:
        return False
    return tuple(residual) == _mod2_vector(model, fiber)


@dataclass(frozen=True)
class SmaleBardenLabel:
    j: int | None  # Barden invariant, None for infinity
    factors: tuple[int, ...]
    rank: int

    def notation(self) -> str:
        j = "inf" if self.j is None else str(self.j)
        ks = ",".join(str(k) for k in self.factors) or "-"
        return f"M_{{{j};{ks};{self.rank}}}"

    def summands(self) -> list[str]:
        parts = []
        if self.j is None:
            parts.append("X_inf")
        elif self.j > 0:
            parts.append(f"X_{self.j}")
        parts.extend(f"M_{k}" for k in self.factors)
        parts.extend(["M_inf"] * self.rank)
        return parts

    def connected_sum(self) -> str:
        parts = self.summands()
        if not parts:
            return "X_0 = S^5"
        if parts == ["M_inf"]:
            return "M_inf = S^2 x S^3"
        return " # ".join(parts)

    def to_dict(self) -> dict:
        return {"barden": "inf" if self.j is None else self.j, "factors": list(self.factors),
                "rank": self.rank, "notation": self.notation(), "connected_sum": self.connected_sum()}


def smale_barden_label(h2: FiniteAbelianGroup, spin: bool = True, barden: int | None = 0) -> SmaleBardenLabel:
    """Decompose ``H_2(M)`` as ``Z^r + (sum Z_k)^2`` (+ ``Z_2^j``-type summand if not spin)."""
    counts = {(p, e): c for p, e, c in h2.torsion}
    if not spin:
        if barden == 0:
            raise InvalidParams("a non-spin manifold has Barden invariant j >= 1 or infinity")
        # X_j contributes Z_{2^j} + Z_{2^j}; X_inf contributes a single Z_2
        key, need = ((2, barden), 2) if barden is not None else ((2, 1), 1)
        if counts.get(key, 0) < need:
            raise NotRealizable(f"H_2 has no summand matching the Barden invariant {barden}")
        counts[key] -= need
        j = barden
    else:
        j = 0
    half = {}
    for key, c in counts.items():
        if c % 2:
            p, e = key
            raise NotRealizable(f"Z_{p**e} occurs {c} times, which is odd")
        if c:
            half[key] = c // 2
    torsion = tuple(sorted((p, e, c) for (p, e), c in half.items()))
    factors = FiniteAbelianGroup(0, torsion).invariant_factors()
    return SmaleBardenLabel(j, tuple(factors), h2.free_rank)


def abelianized_orbifold_pi1(relation_matrix: IntMatrix) -> FiniteAbelianGroup:
    return cokernel(relation_matrix)
