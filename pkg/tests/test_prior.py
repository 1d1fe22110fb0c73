import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdrich import oracle
from pdrich.prior import (
    ParameterBox,
    PartitionData,
    PDParams,
    eppf_log,
    fit_params,
    kn_mean,
    kn_moment,
    kn_pmf,
    log_weight,
)

class TestPDParams:
    def test_valid(self):
        PDParams(0.5, 0.5)
        PDParams(0.25, -0.2)  # theta > -alpha

    @pytest.mark.parametrize("alpha,theta", [(0.0, 1.0), (1.0, 1.0), (-0.1, 1.0),
                                             (0.5, -0.5), (0.5, -0.7)])
    def test_invalid(self, alpha, theta):
        with pytest.raises(ValueError):
            PDParams(alpha, theta)


class TestPartitionData:
    def test_derived_fields(self):
        d = PartitionData((2, 1, 1))
        assert d.n == 4
        assert d.k == 3

    def test_invalid(self):
        with pytest.raises(ValueError):
            PartitionData(())
        with pytest.raises(ValueError):
            PartitionData((2, 0))


class TestEppf:
    def test_single_observation_is_certain(self, params_grid):
        for p in params_grid:
            assert eppf_log(p, PartitionData((1,))) == pytest.approx(0.0, abs=1e-14)

    def test_hand_value(self, half_half):
        # V(4,3) = 1.5/13.125, times (1-alpha)_1 for the block of two
        got = eppf_log(half_half, PartitionData((2, 1, 1)))
        assert got == pytest.approx(math.log(2.0 / 35.0), rel=1e-12)
        assert got == pytest.approx(-2.8622008809294686, abs=1e-10)

    def test_two_singletons(self, half_half):
        assert eppf_log(half_half, PartitionData((1, 1))) == pytest.approx(
            math.log(2.0 / 3.0), rel=1e-13
        )

    def test_symmetric_in_block_order(self, half_half):
        a = eppf_log(half_half, PartitionData((3, 1, 2)))
        b = eppf_log(half_half, PartitionData((1, 2, 3)))
        assert a == b

    def test_addition_rule_over_all_partitions(self, params_grid):
        # summing exp(eppf) over every set partition of [n] gives 1
        for p in params_grid[:4]:
            for n in range(1, 9):
                total = sum(
                    math.exp(eppf_log(p, PartitionData(tuple(len(b) for b in blocks))))
                    for blocks in oracle.enumerate_partitions(n)
                )
                assert total == pytest.approx(1.0, abs=1e-10)


class TestKnPmf:
    def test_point_mass_at_one(self, params_grid):
        for p in params_grid:
            pmf = kn_pmf(p, 1)
            assert pmf.support_min == 1
            assert pmf.prob(1) == pytest.approx(1.0, abs=1e-14)

    def test_two_sample(self, half_half):
        pmf = kn_pmf(half_half, 2)
        np.testing.assert_allclose(pmf.probs, [1 / 3, 2 / 3], rtol=1e-13)

    def test_against_enumeration_n4(self, half_half):
        exact = oracle.exact_kn_pmf(
            oracle.RationalParams(Fraction(1, 2), Fraction(1, 2)), 4
        )
        pmf = kn_pmf(half_half, 4)
        for k in range(1, 5):
            assert pmf.prob(k) == pytest.approx(float(exact[k]), abs=1e-14)

    def test_normalization_sweep(self, params_grid):
        for p in params_grid:
            for n in range(1, 201):
                total = float(np.sum(kn_pmf(p, n).probs))
                assert abs(total - 1.0) <= 1e-10

    def test_rejects_bad_n(self, half_half):
        with pytest.raises(ValueError):
            kn_pmf(half_half, 0)


class TestKnMean:
    def test_one_sample(self, params_grid):
        for p in params_grid:
            assert kn_mean(p, 1) == pytest.approx(1.0, rel=1e-13)

    def test_hand_value(self, half_half):
        assert kn_mean(half_half, 2) == pytest.approx(5.0 / 3.0, rel=1e-13)

    def test_matches_pmf_mean(self, params_grid):
        for p in params_grid:
            for n in (2, 10, 35):
                assert kn_mean(p, n) == pytest.approx(kn_pmf(p, n).mean(), rel=1e-10)


class TestKnMoment:
    def test_one_sample_all_orders(self, half_half):
        for r in range(1, 5):
            assert kn_moment(half_half, 1, r) == pytest.approx(1.0, rel=1e-12)

    def test_first_moment_equals_mean(self, params_grid):
        for p in params_grid:
            for n in range(1, 31):
                assert kn_moment(p, n, 1) == pytest.approx(kn_mean(p, n), rel=1e-10)

    def test_hand_value(self, half_half):
        # terms 1 - 8 + 10
        assert kn_moment(half_half, 2, 2) == pytest.approx(3.0, rel=1e-12)

    def test_matches_pmf_moments(self, params_grid):
        for p in params_grid:
            for n in (2, 7, 23, 50):
                pmf = kn_pmf(p, n)
                for r in range(1, 5):
                    assert kn_moment(p, n, r) == pytest.approx(
                        pmf.moment(r), rel=1e-9
                    )

    def test_rejects_bad_order(self, half_half):
        with pytest.raises(ValueError):
            kn_moment(half_half, 3, 0)


class TestWeightRecursion:
    def test_backward_recursion(self, params_grid):
        # V(n,k) = (n - k*alpha) V(n+1,k) + V(n+1,k+1)
        for p in params_grid:
            for n in range(1, 101):
                for k in range(1, n + 1):
                    lhs = math.exp(log_weight(p, n, k))
                    rhs = (n - k * p.alpha) * math.exp(log_weight(p, n + 1, k)) + math.exp(
                        log_weight(p, n + 1, k + 1)
                    )
                    assert rhs == pytest.approx(lhs, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.05, max_value=0.95),
    st.floats(min_value=0.0, max_value=8.0),
    st.integers(min_value=1, max_value=40),
)
def test_pmf_normalization_property(alpha, theta_off, n):
    p = PDParams(alpha, -alpha + 0.05 + theta_off)
    pmf = kn_pmf(p, n)
    assert float(np.sum(pmf.probs)) == pytest.approx(1.0, abs=1e-10)
    assert pmf.support_min == 1
    assert len(pmf.log_probs) == n


class TestFit:
    def test_dominates_fixed_point(self, half_half):
        data = PartitionData((2, 1, 1))
        res = fit_params(data)
        assert res.log_likelihood >= eppf_log(half_half, data)
        assert res.log_likelihood >= -2.8622008809294686

    def test_all_singletons_hits_boundary(self):
        res = fit_params(PartitionData((1,) * 20))
        assert any(e in res.at_boundary for e in ("alpha_max", "theta_max"))
        # search never loses ground across stages
        assert all(b >= a - 1e-12 for a, b in zip(res.history, res.history[1:]))

    def test_history_monotone(self):
        res = fit_params(PartitionData((4, 2, 1, 1)))
        assert all(b >= a - 1e-12 for a, b in zip(res.history, res.history[1:]))

    def test_permutation_invariance(self):
        a = fit_params(PartitionData((3, 1, 2)))
        b = fit_params(PartitionData((1, 2, 3)))
        assert a.params == b.params
        assert a.log_likelihood == b.log_likelihood

    def test_rejects_single_block(self):
        with pytest.raises(ValueError):
            fit_params(PartitionData((5,)))

    def test_box_validation(self):
        with pytest.raises(ValueError):
            ParameterBox(alpha_min=0.5, alpha_max=0.4)
        with pytest.raises(ValueError):
            ParameterBox(theta_margin=0.0)
