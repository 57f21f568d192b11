"""Certified rational enclosures of transcendental quantities.

Every function returns an :class:`Interval` with rational endpoints that is
guaranteed to contain the true value.  Endpoints are rounded outward to a
dyadic grid of ``2**-bits`` so that denominators stay bounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, isqrt

DEFAULT_BITS = 160


def _down(x: Fraction, bits: int) -> Fraction:
    return Fraction(floor(x * (1 << bits)), 1 << bits)


def _up(x: Fraction, bits: int) -> Fraction:
    return Fraction(-floor(-x * (1 << bits)), 1 << bits)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @classmethod
    def point(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def rounded(self, bits: int) -> "Interval":
        return Interval(_down(self.lo, bits), _up(self.hi, bits))

    def __add__(self, other) -> "Interval":
        other = _iv(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-_iv(other))

    def __rsub__(self, other) -> "Interval":
        return _iv(other) - self

    def __mul__(self, other) -> "Interval":
        other = _iv(other)
        prods = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return Interval(min(prods), max(prods))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = _iv(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other) -> "Interval":
        return _iv(other) / self

    def square(self) -> "Interval":
        if self.lo >= 0:
            return Interval(self.lo**2, self.hi**2)
        if self.hi <= 0:
            return Interval(self.hi**2, self.lo**2)
        return Interval(Fraction(0), max(self.lo**2, self.hi**2))

    def __str__(self) -> str:
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def _iv(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.point(x)


def sqrt_rational(q: Fraction, bits: int = DEFAULT_BITS) -> Interval:
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    a, b = q.numerator, q.denominator
    n = a * b
    r = isqrt(n)
    if r * r == n:
        return Interval.point(Fraction(r, b))
    scale = 1 << bits
    s = isqrt(n * scale * scale)
    return Interval(Fraction(s, b * scale), Fraction(s + 1, b * scale))


def sqrt(x, bits: int = DEFAULT_BITS) -> Interval:
    x = _iv(x)
    return Interval(sqrt_rational(max(x.lo, Fraction(0)), bits).lo, sqrt_rational(x.hi, bits).hi)


def _exp_point(x: Fraction, bits: int) -> Interval:
    if x < 0:
        e = _exp_point(-x, bits + 8)
        return Interval(1 / e.hi, 1 / e.lo).rounded(bits)
    # halve until x <= 1/2, then square back up
    s = 0
    while x > Fraction(1, 2):
        x /= 2
        s += 1
    work = bits + 2 * s + 16
    total, term, k = Fraction(0), Fraction(1), 0
    tol = Fraction(1, 1 << work)
    while True:
        total += term
        k += 1
        term = _down(term * x / k, work + 8) if term * x / k > tol else term * x / k
        if term < tol:
            break
    # tail sum_{j>=k} x^j/j! <= term_exact / (1 - x/(k+1)); term was rounded down so pad
    tail_bound = (term + tol) / (1 - x / (k + 1))
    lo, hi = _down(total, work), _up(total + tail_bound, work) + Fraction(k, 1 << (work + 8))
    out = Interval(lo, hi)
    for _ in range(s):
        out = out.square().rounded(work)
    return out.rounded(bits)


def exp(x, bits: int = DEFAULT_BITS) -> Interval:
    x = _iv(x)
    return Interval(_exp_point(x.lo, bits).lo, _exp_point(x.hi, bits).hi)


def cosh(x, bits: int = DEFAULT_BITS) -> Interval:
    x = _iv(x)
    if x.lo >= 0:
        lo, hi = x.lo, x.hi
    elif x.hi <= 0:
        lo, hi = -x.hi, -x.lo
    else:
        lo, hi = Fraction(0), max(-x.lo, x.hi)

    def point(t):
        e = _exp_point(t, bits + 4)
        return (e + 1 / e) / 2

    return Interval(point(lo).lo, point(hi).hi)


def sinh(x, bits: int = DEFAULT_BITS) -> Interval:
    x = _iv(x)

    def point(t):
        e = _exp_point(t, bits + 4)
        return (e - 1 / e) / 2

    return Interval(point(x.lo).lo, point(x.hi).hi)


def cosh_minus_one(x, bits: int = DEFAULT_BITS) -> Interval:
    """``cosh(x) - 1`` via ``2 sinh(x/2)^2``; stays tight for small ``x``."""
    x = _iv(x)
    s = sinh(x / 2 if isinstance(x, Interval) else Fraction(x) / 2, bits + 8)
    return (2 * s.square()).rounded(bits)


def _atanh_series(z: Fraction, bits: int) -> Interval:
    # atanh z = sum z^(2k+1)/(2k+1), 0 <= z < 1
    tol = Fraction(1, 1 << (bits + 8))
    total, power, k = Fraction(0), z, 0
    z2 = z * z
    while True:
        term = power / (2 * k + 1)
        total += term
        k += 1
        power = _down(power * z2, bits + 16)
        if power / (2 * k + 1) < tol:
            break
    tail = (power + Fraction(k, 1 << (bits + 16))) / (2 * k + 1) / (1 - z2)
    return Interval(_down(total - Fraction(k, 1 << (bits + 16)), bits + 8), _up(total + tail, bits + 8))


def _log_point(y: Fraction, bits: int) -> Interval:
    if y <= 0:
        raise ValueError("log of a nonpositive number")
    k = 0
    while y >= 2:
        y /= 2
        k += 1
    while y < 1:
        y *= 2
        k -= 1
    ln2 = 2 * _atanh_series(Fraction(1, 3), bits + 16)
    rest = 2 * _atanh_series((y - 1) / (y + 1), bits + 16)
    return (k * ln2 + rest).rounded(bits)


def log(x, bits: int = DEFAULT_BITS) -> Interval:
    x = _iv(x)
    return Interval(_log_point(x.lo, bits).lo, _log_point(x.hi, bits).hi)


def _atan_inv(n: int, bits: int) -> Interval:
    # atan(1/n) alternating series; consecutive partial sums bracket the value
    x = Fraction(1, n)
    total, k = Fraction(0), 0
    tol = Fraction(1, 1 << (bits + 8))
    while True:
        term = x ** (2 * k + 1) / (2 * k + 1)
        if term < tol:
            break
        total += term if k % 2 == 0 else -term
        k += 1
    # next term has sign (-1)^k and magnitude < tol
    lo, hi = (total, total + term) if k % 2 == 0 else (total - term, total)
    return Interval(_down(lo, bits + 8), _up(hi, bits + 8))


def pi(bits: int = DEFAULT_BITS) -> Interval:
    return (16 * _atan_inv(5, bits + 8) - 4 * _atan_inv(239, bits + 8)).rounded(bits)


def arccosh(x, bits: int = DEFAULT_BITS) -> Interval:
    """``arccosh`` of an interval contained in ``[1, inf)``."""
    x = _iv(x)
    if x.lo < 1:
        raise ValueError("arccosh needs x >= 1")
    arg = x + sqrt(x.square() - 1, bits + 8)
    return log(arg, bits)
