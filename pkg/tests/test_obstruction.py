import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kcontact import obstruction as obs
from kcontact.errors import EffectivityViolation, IncompleteLedger, InvalidParams
from kcontact.obstruction import (
    BasisCandidate,
    Surd,
    admissible_quotients,
    canonical_coeffs,
    compute_T0,
    constants_pipeline,
    diophantine_family,
    eliminate_k2_nonpositive,
    k2_at_forced_m1,
    k2_threshold,
    k_squared,
    m1_interval,
    orbifold_euler_complement,
    packing_count_bound,
    residual_point_bound,
    s_a_sequence,
    separated_primes,
    structured_quotients,
    t8_interval,
    window_intruders,
)

pos_rat = st.fractions(min_value=Fraction(1, 3), max_value=9, max_denominator=50)


class TestEuler:
    def test_examples(self):
        assert orbifold_euler_complement((1, 1, 1)) == 5
        assert orbifold_euler_complement((2, 1, 10), (2, 2)) == 24

    def test_point_bound_is_tight(self):
        g = (2, 1, 10)
        k = residual_point_bound(g)
        assert orbifold_euler_complement(g, [2] * k) == 0
        assert orbifold_euler_complement(g, [2] * (k + 1)) < 0

    @given(st.tuples(*[st.integers(0, 30)] * 3), st.integers(2, 50))
    def test_extra_point_strictly_decreases(self, g, d):
        base = orbifold_euler_complement(g)
        assert base - orbifold_euler_complement(g, [d]) == 1 - Fraction(1, d)

    def test_T0(self):
        assert compute_T0() == 662
        assert compute_T0([(1, 1, 1)] * 3) == 30
        assert compute_T0([(2, 5, 11), (17, 26, 10), (37, 50, 10)]) > 662
        with pytest.raises(InvalidParams):
            compute_T0([(1, 1, 1)])


class TestCanonical:
    def test_good_basis(self):
        b = BasisCandidate.of((2, 2, 10), (1, 1, 1))
        assert canonical_coeffs(b) == (1, -3, -19)

    def test_effectivity(self):
        b = BasisCandidate.of((2, 2, 10), (2, 1, 1))
        with pytest.raises(EffectivityViolation):
            canonical_coeffs(b)
        assert canonical_coeffs(b, check=False)[0] == 0

    def test_k_squared_formula(self):
        b = BasisCandidate.of((2, 2, 10), (1, 1, 1))
        a1, a2, a3 = canonical_coeffs(b)
        # K = sum a_i D_i with D_1^2 = m1, D_i^2 = -m_i otherwise
        assert k_squared(b) == a1 * a1 * 1 - a2 * a2 - a3 * a3

    @given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 20), pos_rat, pos_rat, pos_rat)
    def test_k_squared_symmetric(self, g1, g2, g3, m1, m2, m3):
        b = BasisCandidate.of((g1, g2, g3), (m1, m2, m3))
        swapped = BasisCandidate.of((g1, g3, g2), (m1, m3, m2))
        assert k_squared(b) == k_squared(swapped)

    def test_singular_points_add_to_chi(self):
        b = BasisCandidate.of((1, 1, 1), (1, 1, 1), ((2, 3), (), ()))
        assert b.curves[0].chi == Fraction(1, 2) + Fraction(2, 3)
        assert not b.good

    def test_signs_validated(self):
        with pytest.raises(InvalidParams):
            BasisCandidate.of((1, 1, 1), (-1, 1, 1))


def test_s_a_sequence():
    assert s_a_sequence(11, 2) == [11, 251]
    assert s_a_sequence(11, 1) == [11]
    seq = s_a_sequence(5, 4)
    assert all(b > 2 * a * a for a, b in zip(seq, seq[1:]))


class TestLedger:
    def test_small_chain(self):
        L = constants_pipeline(N_of_1=10)
        assert (L.T1, L.T2, L.T3, L.T4) == (361, 36, 48, 178)
        assert L.R == 340340 == 4 * 5 * 7 * 11 * 13 * 17
        assert L.N0 == 4 * L.T0 + 1
        assert L.N_final == max(L.N_leq, L.N_gt)

    def test_default_audit_labels(self):
        L = constants_pipeline()
        origins = {e.name: e.origin for e in L.entries}
        assert origins["T0"] == origins["eps"] == origins["T5"] == "artifact-default"
        assert origins["T1"] == origins["N0"] == "forced"
        assert constants_pipeline(eps="1/5").to_dict()["eps"]["origin"] == "input"

    def test_t8(self):
        assert t8_interval(Fraction(4), Fraction(1)).is_exact
        assert t8_interval(Fraction(4), Fraction(1)).lo == 48
        L = constants_pipeline(N_of_1=10, eps=1)
        T7 = L.T7_sq
        # T7^2 is a perfect square here, so the relation holds exactly
        root = Fraction(int(T7.numerator ** 0.5 + 0.5))
        assert root * root == T7 and L.T8.lo == 48 * (root - 1)

    def test_monotone(self):
        prev = None
        for n1 in (5, 7, 11, 13):
            L = constants_pipeline(N_of_1=n1)
            row = (L.T1, L.T2, L.T3, L.T4)
            assert prev is None or all(a <= b for a, b in zip(prev, row))
            prev = row
        t8 = [constants_pipeline(N_of_1=10, eps=e).T8.lo for e in ("1/2", "1/4", "1/8")]
        assert t8 == sorted(t8)

    def test_overrides(self):
        L = constants_pipeline(N_of_1=10, T0=1, g_a=2, T5=10, N_leq=7)
        assert L.N0 == 5 and L.n0 == 3 and L.N_leq == 7
        with pytest.raises(InvalidParams):
            constants_pipeline(eps=0)


class TestK2:
    def test_threshold(self):
        bound, n = k2_threshold(178)
        assert n * n > bound >= (n - 1) ** 2
        brute = max(Fraction((18 + m) ** 2, m) for m in range(1, 20 + 178 + 1))
        assert bound == 2 + 178 + brute

    def test_forced_m1(self):
        for n in (3, 10, 29):
            assert k2_at_forced_m1(n, 0, 18) == n * n - 72

    def test_verdict_stable(self):
        L = constants_pipeline(N_of_1=10)
        thr = eliminate_k2_nonpositive(2, 2, L).threshold
        verdicts = [eliminate_k2_nonpositive(n, n + 2, L).positive for n in range(thr - 3, thr + 30)]
        first = verdicts.index(True)
        assert all(verdicts[first:]) and first == 3
        worst = max(range(1, 20 + L.T4 + 1), key=lambda m: Fraction((18 + m) ** 2, m))
        assert k2_at_forced_m1(thr, 2 + L.T4, worst) > 0

    def test_incomplete(self):
        with pytest.raises(IncompleteLedger):
            eliminate_k2_nonpositive(5, 7, None)


class TestPacking:
    def test_trivial_plug_in(self):
        pb = packing_count_bound(4, 1)
        assert pb.approximation.lo == 48
        assert pb.enclosure.lo <= pb.count < pb.enclosure.hi + 1

    @pytest.mark.parametrize("eps", ["1/100", "1/1000"])
    def test_small_eps_agreement(self, eps):
        r = packing_count_bound(4, eps).ratio()
        assert abs(r.lo - 1) < Fraction(1, 100) and abs(r.hi - 1) < Fraction(1, 100)

    def test_cap_identity(self):
        cap = obs.hyperbolic_cap_check(Fraction(9))
        assert cap.consistent and cap.width < Fraction(1, 10**12)

    def test_bad_input(self):
        with pytest.raises(InvalidParams):
            packing_count_bound(1, 1)


class TestDiophantine:
    def test_examples(self):
        assert diophantine_family(1, 1, 1, 1, 1) == (1, 1, 3)
        assert diophantine_family(2, 1, 1, 0, 1) == (4, 0, 4)

    def test_errors(self):
        with pytest.raises(InvalidParams):
            diophantine_family(3, 1, 1, 1, 4)
        with pytest.raises(InvalidParams):
            diophantine_family(3, 1, 2, 2, 1)

    def test_random_draws_satisfy_equation(self):
        rnd = random.Random(3)
        draws = 0
        while draws < 10**4:
            q = rnd.randint(1, 40)
            lam, mu = rnd.randint(-50, 50), rnd.randint(-50, 50)
            if gcd(lam, mu) != 1:
                continue
            s = rnd.choice(obs._signed_divisors(2 * q))
            x, y, z = diophantine_family(q, rnd.randint(-9, 9), lam, mu, s)
            assert x * x + 8 * q * y * y == z * z
            draws += 1

    @pytest.mark.parametrize("q", [1, 5, 12])
    def test_small_completeness(self, q):
        assert obs.completeness_check(q, 12, 60).ok


class TestQuotients:
    def test_divisor_count(self):
        assert len(obs.divisors(4 * obs.R_DEFAULT)) == 160

    def test_set_contains_one_and_is_symmetric(self):
        Q = admissible_quotients(5, 7, R=60)
        assert Fraction(1) in Q
        assert {1 / v for v in Q} == admissible_quotients(7, 5, R=60)
        with pytest.raises(InvalidParams):
            admissible_quotients(4, 7)

    def test_full_set_always_has_intruders(self):
        # d_i/d_j can sit arbitrarily close to 1, so only the structured set separates
        assert window_intruders(admissible_quotients(101, 11, R=60), 101, 11, "1/10")

    def test_separated_primes_clear_the_window(self):
        small, big = separated_primes("1/10", R=60)
        vals = structured_quotients(big, small, R=60)
        assert Fraction(big * big, small * small) in vals
        assert window_intruders(vals, big, small, "1/10") == []

    def test_default_separated_primes(self):
        assert separated_primes() == (1512629, 3460949968733768659)


class TestM1Interval:
    def test_membership(self):
        for n in (1, 2, 7, 40):
            for T6 in (2, 5, Fraction(902)):
                iv = m1_interval(n, T6)
                assert iv.relaxed_contains(2 * n * n - 1)
                assert iv.contains(2 * n * n) and not iv.contains(2 * n * n + 1)

    def test_exact_interval_matches_inequality(self):
        n, T6 = 9, Fraction(30)
        iv = m1_interval(n, T6)
        # the upper end 2n^2 is imposed separately; below it the surd is exact
        for m in range(1, 2 * n * n + 1):
            direct = Fraction((2 * n * n - m) ** 2, m) <= T6
            assert iv.contains(m) == direct

    def test_degenerate(self):
        iv = m1_interval(5, 0)
        assert iv.contains(50) and not iv.contains(49)

    def test_surd(self):
        s = Surd(Fraction(1), Fraction(1), Fraction(2))
        assert s >= Fraction(241, 100) and s <= Fraction(242, 100)
        assert Surd(Fraction(3), Fraction(-1), Fraction(9)).sign_minus(0) == 0
