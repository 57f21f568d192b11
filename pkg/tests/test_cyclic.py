from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kcontact.cyclic import (
    CyclicSingularity,
    HJChain,
    LocalAction,
    dual,
    hj_eval,
    hj_expand,
    local_contribution,
    local_contribution_at,
    log_discrepancies,
    pullback_coeffs,
    reduce_action,
)
from kcontact.errors import DegenerateConfiguration, InvalidChain

from oracles import chain_gram, continued_fraction, local_contribution_oracle, pullback_oracle, pullback_oracle_sympy

chains = st.lists(st.integers(2, 6), min_size=1, max_size=8)


@pytest.mark.parametrize("d,r,chain", [(18, 17, [2] * 17), (2, 1, [2]), (5, 3, [2, 3]), (7, 1, [7])])
def test_expand_examples(d, r, chain):
    assert list(hj_expand(CyclicSingularity(d, r)).coeffs) == chain


def test_eval_examples():
    assert hj_eval([2, 3]) == (5, 3)
    assert hj_eval([2] * 17) == (18, 17)


def test_invalid_chain_and_singularity():
    with pytest.raises(InvalidChain):
        HJChain.of([2, 1])
    with pytest.raises(InvalidChain):
        HJChain.of([])
    with pytest.raises(ValueError):
        CyclicSingularity(6, 4)


@given(chains)
def test_eval_matches_continued_fraction(coeffs):
    d, r = hj_eval(coeffs)
    assert Fraction(d, r) == continued_fraction(coeffs)
    assert list(hj_expand(CyclicSingularity(d, r)).coeffs) == coeffs


def test_dual_examples():
    assert dual(CyclicSingularity(18, 17)) == CyclicSingularity(18, 17)
    assert dual(CyclicSingularity(5, 3)) == CyclicSingularity(5, 2)


def test_dual_reverses_chain_exhaustively():
    for d in range(2, 201):
        for r in range(1, d):
            if gcd(r, d) != 1:
                continue
            s = CyclicSingularity(d, r)
            t = dual(s)
            assert dual(t) == s
            assert hj_expand(t).coeffs == hj_expand(s).coeffs[::-1]


def test_pullback_examples():
    assert pullback_coeffs([2, 2]) == [Fraction(2, 3), Fraction(1, 3)]
    assert pullback_coeffs([2]) == [Fraction(1, 2)]
    assert pullback_coeffs([2, 2], "last") == [Fraction(1, 3), Fraction(2, 3)]
    with pytest.raises(ValueError):
        pullback_coeffs([2], "middle")


@given(chains)
def test_pullback_orthogonal_and_decreasing(coeffs):
    r = pullback_coeffs(coeffs)
    assert r == pullback_oracle(coeffs, 0) == pullback_oracle_sympy(coeffs, 0)
    G = chain_gram(coeffs)
    for j in range(len(coeffs)):
        tail = 1 if j == 0 else 0
        assert tail + sum(G[j][i] * r[i] for i in range(len(r))) == 0
    assert all(0 < x < 1 for x in r)
    assert all(a > b for a, b in zip(r, r[1:]))


def test_log_discrepancy_examples():
    assert log_discrepancies([2, 2]) == [Fraction(-2, 3), Fraction(-1, 3)]
    assert log_discrepancies([2, 2, 2], tail_attached=False) == [0, 0, 0]


@given(chains, st.booleans())
def test_log_discrepancies_recurrence(coeffs, tail):
    a = log_discrepancies(coeffs, tail)
    ext = [Fraction(-1 if tail else 0)] + a + [Fraction(0)]
    for i, b in enumerate(coeffs, start=1):
        assert (ext[i - 1] - ext[i]) + (ext[i + 1] - ext[i]) == (ext[i] + 1) * (b - 2)
    assert min(a) >= -1


def test_local_contribution_examples():
    assert local_contribution(None, None, 2) == 1
    assert local_contribution((1, 0), (2, 1), 2) == Fraction(4, 3)
    assert local_contribution_at([2, 2], 1) == Fraction(4, 3)
    assert local_contribution_oracle([2, 2], 1) == Fraction(4, 3)


def test_local_contribution_errors():
    with pytest.raises(InvalidChain):
        local_contribution(None, None, 1)
    with pytest.raises(DegenerateConfiguration):
        local_contribution((2, 3), (2, 3), 2)
    with pytest.raises(ValueError):
        local_contribution_at([2, 2], 3)


@given(chains, st.data())
def test_local_contribution_matches_pullback_oracle(coeffs, data):
    j = data.draw(st.integers(1, len(coeffs)))
    ell = local_contribution_at(coeffs, j)
    assert ell == local_contribution_oracle(coeffs, j)
    assert ell >= 1


@pytest.mark.parametrize("m,j1,j2,expect", [
    (18, 1, 17, (1, 1, 18)),
    (2, 1, 1, (1, 1, 2)),
    (12, 4, 3, (4, 3, 1)),
])
def test_reduce_action(m, j1, j2, expect):
    red = reduce_action(LocalAction(m, j1, j2))
    assert (red.m1, red.m2, red.d) == expect
    assert red.m1 * red.m2 * red.d == m
