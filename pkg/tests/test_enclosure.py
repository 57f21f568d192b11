import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kcontact import enclosure as enc
from kcontact.enclosure import Interval

rationals = st.fractions(min_value=Fraction(-8), max_value=Fraction(8), max_denominator=1000)


def test_interval_arithmetic():
    a = Interval(Fraction(1), Fraction(2))
    b = Interval(Fraction(-1), Fraction(3))
    assert a + b == Interval(Fraction(0), Fraction(5))
    assert a * b == Interval(Fraction(-2), Fraction(6))
    assert b.square().lo == 0
    with pytest.raises(ZeroDivisionError):
        a / b
    with pytest.raises(ValueError):
        Interval(Fraction(2), Fraction(1))


def test_pi_and_e():
    p = enc.pi(128)
    assert p.contains(Fraction(math.pi)) or p.width < Fraction(1, 2**100)
    assert p.lo < Fraction(355, 113) and p.lo > Fraction(333, 106)
    e = enc.exp(Fraction(1), 128)
    assert Fraction(2718281828459045235, 10**18) < e.lo <= e.hi < Fraction(2718281828459045236, 10**18)


@given(rationals)
def test_exp_log_round_trip(x):
    e = enc.exp(x, 96)
    assert e.width < Fraction(1, 2**60) * max(1, e.hi)
    assert e.lo <= Fraction(math.exp(float(x))) * (1 + Fraction(1, 10**12))
    back = enc.log(e, 96)
    assert back.lo - Fraction(1, 2**50) <= x <= back.hi + Fraction(1, 2**50)


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(6), max_denominator=500))
def test_cosh_identity(x):
    lhs = enc.cosh(x, 128) - 1
    rhs = enc.cosh_minus_one(x, 128)
    two_sinh_sq = 2 * enc.sinh(x / 2, 128).square()
    assert lhs.overlaps(rhs) and rhs.overlaps(two_sinh_sq)


def test_sqrt_and_arccosh():
    s = enc.sqrt_rational(Fraction(2), 128)
    assert s.lo * s.lo <= 2 <= s.hi * s.hi
    assert enc.sqrt_rational(Fraction(49, 4)).is_exact
    r = enc.arccosh(Interval.point(Fraction(2)), 128)
    assert r.contains(Fraction(math.acosh(2))) or r.width < Fraction(1, 2**90)
    back = enc.cosh(r, 128)
    assert back.contains(Fraction(2))


def test_log_domain():
    with pytest.raises(ValueError):
        enc.log(Fraction(0))
