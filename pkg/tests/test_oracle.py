from fractions import Fraction

import pytest

from pdrich.oracle import (
    RationalParams,
    enumerate_partitions,
    exact_eppf,
    exact_km_pmf,
    exact_kn_pmf,
    exact_sm_pmf,
)

HALF = RationalParams(Fraction(1, 2), Fraction(1, 2))


class TestRationalParams:
    def test_valid(self):
        RationalParams(Fraction(1, 4), Fraction(-1, 8))

    def test_invalid_domain(self):
        with pytest.raises(ValueError):
            RationalParams(Fraction(0), Fraction(1))
        with pytest.raises(ValueError):
            RationalParams(Fraction(1, 2), Fraction(-1, 2))

    def test_denominator_bound(self):
        with pytest.raises(ValueError):
            RationalParams(Fraction(1, 3), Fraction(1, 7), max_denominator=2)


class TestEnumeration:
    @pytest.mark.parametrize("n,bell", [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)])
    def test_bell_counts(self, n, bell):
        assert sum(1 for _ in enumerate_partitions(n)) == bell

    def test_no_duplicates(self):
        seen = set(enumerate_partitions(4))
        assert len(seen) == 15

    def test_blocks_partition_the_set(self):
        for blocks in enumerate_partitions(5):
            elements = sorted(x for b in blocks for x in b)
            assert elements == [1, 2, 3, 4, 5]

    def test_rejects_over_cap(self):
        with pytest.raises(ValueError):
            next(enumerate_partitions(13))
        with pytest.raises(ValueError):
            next(enumerate_partitions(0))


class TestExactKn:
    def test_two_sample(self):
        assert exact_kn_pmf(HALF, 2) == {1: Fraction(1, 3), 2: Fraction(2, 3)}

    @pytest.mark.parametrize("alpha", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
    @pytest.mark.parametrize("theta", [Fraction(1, 2), Fraction(2)])
    def test_masses_sum_to_exactly_one(self, alpha, theta):
        rp = RationalParams(alpha, theta)
        for n in range(1, 9):
            assert sum(exact_kn_pmf(rp, n).values()) == 1

    def test_rejects_over_cap(self):
        with pytest.raises(ValueError):
            exact_kn_pmf(HALF, 13)


class TestExactEppf:
    def test_addition_rule_exact(self):
        for n in range(1, 7):
            total = Fraction(0)
            for blocks in enumerate_partitions(n):
                total += exact_eppf(HALF, [len(b) for b in blocks])
            assert total == 1

    def test_single_observation(self):
        assert exact_eppf(HALF, (1,)) == 1


class TestExactKm:
    def test_m_zero_is_point_mass(self):
        cond = exact_km_pmf(HALF, (2, 1), 0)
        assert cond.pmf == (Fraction(1),)

    def test_two_singleton_pilot_one_step(self):
        # continuation probabilities: old (n-k*alpha)/(theta+n) = 2/5,
        # new (theta+k*alpha)/(theta+n) = 3/5
        cond = exact_km_pmf(HALF, (1, 1), 1)
        assert cond.pmf == (Fraction(2, 5), Fraction(3, 5))

    def test_pilot_order_irrelevant(self):
        a = exact_km_pmf(HALF, (2, 1), 3)
        b = exact_km_pmf(HALF, (1, 2), 3)
        assert a == b

    def test_equal_nk_pilots_same_law(self):
        # different multiplicity profiles with equal (n, k)
        a = exact_km_pmf(HALF, (3, 1), 4)
        b = exact_km_pmf(HALF, (2, 2), 4)
        assert a.pmf == b.pmf

    def test_pmf_sums_to_one(self):
        cond = exact_km_pmf(HALF, (2, 1, 1), 5)
        assert sum(cond.pmf) == 1

    def test_joint_sm_margin_is_beta_binomial(self):
        rp = RationalParams(Fraction(1, 2), Fraction(1))
        cond = exact_km_pmf(rp, (2, 1), 6)
        assert cond.sm == exact_sm_pmf(rp, 3, 2, 6)

    def test_joint_km_slice_is_shifted_prior_law(self):
        # within S_m = s the new-species count follows the species-count law
        # of an s-sample at theta + k*alpha, exactly in rationals
        rp = RationalParams(Fraction(1, 2), Fraction(1, 2))
        pilot = (2, 1)
        k = len(pilot)
        cond = exact_km_pmf(rp, pilot, 5)
        shifted = RationalParams(rp.alpha, rp.theta + k * rp.alpha)
        for s in range(2, 6):
            strat = cond.given_sm(s)
            assert strat is not None
            want = exact_kn_pmf(shifted, s)
            assert strat[0] == 0
            for j in range(1, s + 1):
                assert strat[j] == want.get(j, Fraction(0))

    def test_rejects_over_cap(self):
        with pytest.raises(ValueError):
            exact_km_pmf(HALF, (2, 1), 10)

    def test_rejects_bad_pilot(self):
        with pytest.raises(ValueError):
            exact_km_pmf(HALF, (), 2)
        with pytest.raises(ValueError):
            exact_km_pmf(HALF, (1, 0), 2)


class TestExactSm:
    def test_sums_to_one(self):
        rp = RationalParams(Fraction(3, 4), Fraction(2))
        assert sum(exact_sm_pmf(rp, 5, 3, 7)) == 1

    def test_zero_draws(self):
        assert exact_sm_pmf(HALF, 4, 2, 0) == (Fraction(1),)
