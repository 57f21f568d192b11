import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kcontact import construction as cons
from kcontact.construction import (
    CHAIN,
    PrimeScheme,
    SL2Matrix,
    a_square_formula,
    assemble_orbifold,
    base_form,
    build_prime_scheme,
    check_multiplicity_pattern,
    contract_chain_bookkeeping,
    expected_h2_orders,
    glued_genus,
    gompf_bookkeeping,
    monodromy_product,
    multiplicities,
    mumford_pairing,
    fibre_sum_curve_system,
    pi1_abelianization,
    pi1_relation_matrix,
    pullbacks,
    solve_A_system,
    surjectivity_witnesses,
    tn_invariants,
    vanishing_matrix,
    verify_monodromy,
)
from kcontact.cyclic import CyclicSingularity
from kcontact.errors import InvalidParams, NotNegativeDefinite
from kcontact.lattice import FiniteAbelianGroup
from kcontact.seifert import h1_vanishing_report, h2_total_space, spin_check

from oracles import random_negative_definite_config


class TestMonodromy:
    def test_vanishing_matrices(self):
        assert vanishing_matrix(1, 0).rows() == [[1, -1], [0, 1]]
        assert vanishing_matrix(1, 1).rows() == [[2, -1], [1, 0]]
        assert vanishing_matrix(2, -1).rows() == [[-1, -4], [1, 3]]

    @given(st.integers(-20, 20), st.integers(-20, 20))
    def test_det_and_trace(self, p, q):
        if (p, q) == (0, 0):
            return
        M = vanishing_matrix(p, q)
        assert M.a * M.d - M.b * M.c == 1 and M.trace == 2

    def test_product_is_identity(self):
        assert verify_monodromy()
        assert monodromy_product() == SL2Matrix.identity()

    def test_partial_products(self):
        assert (vanishing_matrix(1, 0) ** 9).rows() == [[1, -9], [0, 1]]
        assert monodromy_product(()) == SL2Matrix.identity()

    def test_not_sl2(self):
        with pytest.raises(ValueError):
            SL2Matrix(1, 1, 1, 1)


def test_gompf_and_genus():
    assert gompf_bookkeeping(12, 12, 1) == (24, 22)
    assert gompf_bookkeeping(4, 4, 0)[0] == 4
    assert glued_genus(0, 0, 1) == 0
    assert glued_genus(1, 1, 1) == 2


@pytest.mark.parametrize("n,expect", [(1, (2, 2)), (0, (1, 0)), (3, (10, 18))])
def test_tn_examples(n, expect):
    assert tn_invariants(n) == expect


def test_tn_adjunction():
    for n in range(51):
        g, sq = tn_invariants(n)
        assert 2 * g - 2 == sq == 2 * n * n


def test_tn_from_curve_system():
    cs = fibre_sum_curve_system()
    T1 = {"T": 2, "D": 1}
    assert cs.pair(T1, T1) == 2 and cs.canonical_dot(T1) == 0


class TestCurveA:
    def test_solution(self):
        sol = solve_A_system()
        assert sol.coeffs == tuple(range(9, 0, -1))
        assert sol.A_sq == 18 and sol.K_dot_A == 0 and sol.genus == 10

    def test_closed_form_square(self):
        assert a_square_formula(range(9, 0, -1)) == 18

    def test_orthogonal_to_chain(self):
        cs = fibre_sum_curve_system()
        A = cons.a_class(solve_A_system().coeffs)
        assert [cs.pair(A, {c: 1}) for c in CHAIN] == [0] * 17
        # off the chain A meets C9 through its C1 and C8 coefficients
        assert cs.pair(A, {"C9": 1}) == 8 + 1


def test_curve_system_shape():
    cs = fibre_sum_curve_system()
    assert cs.dot("C9", "C1") == 1 and cs.dot("C1", "C3") == 0
    assert cs.dot("E2", "C4") == cs.dot("E2", "C4'") == 1
    assert cs.dot("F", "F") == 0 and cs.dot("D", "T") == 1
    with pytest.raises(ValueError):
        cs.add("F", 0)


def test_chain_contraction():
    assert contract_chain_bookkeeping([2] * 17, 20) == (CyclicSingularity(18, 17), 3)
    assert contract_chain_bookkeeping([2], 2) == (CyclicSingularity(2, 1), 1)
    assert contract_chain_bookkeeping([2, 3], 5) == (CyclicSingularity(5, 3), 3)
    cs = fibre_sum_curve_system()
    assert [cs.dot(c, c) for c in CHAIN] == [-2] * 17
    assert all(cs.dot(u, v) == 1 for u, v in zip(CHAIN, CHAIN[1:]))


class TestMumford:
    def test_torus_over_contracted_D(self):
        cs = fibre_sum_curve_system()
        form = mumford_pairing(cs, [{"T": 1}, {"T'": 1}], ["D", "D'"])
        assert form.gram == ((Fraction(1, 2), 0), (0, Fraction(1, 2)))

    def test_disjoint_class_unchanged(self):
        cs = fibre_sum_curve_system()
        assert mumford_pairing(cs, [{"T'": 1}], ["D"]).gram == ((0,),)

    def test_base_form(self):
        assert base_form().gram == ((Fraction(1, 2), 0, 0), (0, Fraction(1, 2), 0), (0, 0, 18))

    def test_not_negative_definite(self):
        cs = fibre_sum_curve_system()
        with pytest.raises(NotNegativeDefinite):
            pullbacks(cs, [{"D": 1}], ["T"])

    def test_random_configurations(self):
        rnd = random.Random(11)
        for _ in range(200):
            cs, contracted, outside = random_negative_definite_config(rnd)
            classes = [{o: rnd.randint(-3, 3)} for o in outside]
            pulled = pullbacks(cs, classes, contracted)
            for y in pulled:
                assert all(cs.pair(y, {c: 1}) == 0 for c in contracted)
            form = mumford_pairing(cs, classes, contracted)
            shuffled = list(contracted)
            rnd.shuffle(shuffled)
            assert mumford_pairing(cs, classes, shuffled) == form


class TestPrimeScheme:
    def test_examples(self):
        assert build_prime_scheme(0).p == ((5,),)
        assert build_prime_scheme(1).p == ((5, 7), (11, 13))

    def test_distinct_for_ten(self):
        s = build_prime_scheme(10)
        flat = [q for row in s.p for q in row]
        assert len(set(flat)) == 121 and min(flat) >= 5

    def test_validation(self):
        with pytest.raises(InvalidParams):
            PrimeScheme(0, ((3,),))
        with pytest.raises(InvalidParams):
            PrimeScheme(1, ((5, 7), (7, 11)))
        with pytest.raises(InvalidParams):
            build_prime_scheme(-1)

    def test_multiplicities(self):
        assert multiplicities(build_prime_scheme(0)) == ([5], [25], 125)
        mT, mTp, mA = multiplicities(build_prime_scheme(1))
        assert gcd(mT[0], mT[1]) == 1 and mA == (5 * 7 * 11 * 13) ** 3

    @pytest.mark.parametrize("N", range(5))
    def test_gcd_pattern(self, N):
        assert check_multiplicity_pattern(build_prime_scheme(N))


@pytest.mark.parametrize("N", range(5))
def test_target_homology(N):
    con = assemble_orbifold(N)
    rep = h1_vanishing_report(con.bundle)
    assert rep.all_true
    h2 = h2_total_space(con.bundle, rep)
    assert h2 == FiniteAbelianGroup.from_cyclic_orders(expected_h2_orders(con.scheme), free_rank=2)
    assert spin_check(con.bundle)
    for p, images in surjectivity_witnesses(con).items():
        assert all(x % p for x in images)


def test_n0_group_text():
    h2 = h2_total_space(assemble_orbifold(0).bundle)
    assert str(h2) == "Z^2 + Z_5^2 + Z_25^2 + Z_125^20"


def test_b0_and_mu_c1_on_A():
    con = assemble_orbifold(2)
    x = con.bundle.chern * con.bundle.mu
    assert con.model.pair(x, con.model.generators[2]) == 18  # <mu c1, A> with b_A = 1
    assert con.b0 % 2 == 1 and gcd(con.b0, con.m_T[0]) == 1
    assert (con.b0 * con.j0) % con.m_T[0] == 1
    assert h1_vanishing_report(con.bundle).cond3_gcd == 1


@pytest.mark.parametrize("N", range(5))
def test_pi1_trivial(N):
    assert pi1_abelianization(N).is_trivial


@pytest.mark.parametrize("N", range(1, 5))
def test_pi1_negative_control(N):
    assert not pi1_abelianization(N, isotropy_relations=False).is_trivial


def test_pi1_b_relations_alone():
    from kcontact.lattice import IntMatrix, cokernel
    assert cokernel(IntMatrix.from_rows([[9], [8]])).is_trivial
    M = pi1_relation_matrix(1)
    assert M.cols == len(cons.pi1_generators(1))
