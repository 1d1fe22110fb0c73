import math
from fractions import Fraction

import numpy as np
import pytest

from pdrich import oracle
from pdrich import simulate as sim
from pdrich.conditional import PredictionQuery, km_pmf, sm_pmf
from pdrich.pmf import tv_distance
from pdrich.prior import PDParams, kn_mean, kn_pmf


class TestSeatState:
    def test_derived_fields(self):
        st = sim.SeatState((3, 1, 1))
        assert st.n == 5
        assert st.k == 3

    def test_invalid(self):
        with pytest.raises(ValueError):
            sim.SeatState(())
        with pytest.raises(ValueError):
            sim.SeatState((2, 0))


class TestCrpSample:
    def test_single_customer(self, half_half):
        assert sim.crp_sample(half_half, 1, 0) == sim.SeatState((1,))

    def test_sizes_sum_to_n(self, half_half):
        for seed in range(5):
            st = sim.crp_sample(half_half, 40, seed)
            assert st.n == 40

    def test_deterministic(self, half_half):
        assert sim.crp_sample(half_half, 25, 7) == sim.crp_sample(half_half, 25, 7)

    def test_two_sample_split_probability(self, half_half):
        ks = sim.crp_kn_batch(half_half, 2, 100_000, 42)
        p_hat = float(np.mean(ks == 2))
        se = math.sqrt((2 / 3) * (1 / 3) / 100_000)
        assert abs(p_hat - 2 / 3) <= 3 * se

    def test_mean_species_count_50(self, half_half):
        ks = sim.crp_kn_batch(half_half, 50, 100_000, 43)
        se = float(np.std(ks)) / math.sqrt(len(ks))
        assert abs(float(np.mean(ks)) - kn_mean(half_half, 50)) <= 3 * se


class TestContinueSample:
    def test_zero_steps(self, half_half):
        st = sim.SeatState((2, 1))
        out = sim.continue_sample(st, half_half, 0, 5)
        assert out == sim.ContinueResult(0, 0, st)

    def test_counts_consistent_with_state(self, half_half):
        st = sim.SeatState((2, 1))
        out = sim.continue_sample(st, half_half, 10, 11)
        assert out.state.n == st.n + 10
        assert out.state.k == st.k + out.k_new
        assert out.k_new <= out.s_new <= 10

    def test_occupancy_law(self, half_half):
        st = sim.SeatState((2,))
        _, sq = sim.continue_batch(st, half_half, 5, 100_000, 44)
        emp = np.bincount(sq, minlength=6) / len(sq)
        exact = sm_pmf(PredictionQuery(half_half, 2, 1, 5)).probs
        assert tv_distance(emp, exact) <= 0.01

    def test_new_species_law(self, half_half):
        st = sim.SeatState((2,))
        kq, _ = sim.continue_batch(st, half_half, 5, 100_000, 44)
        emp = np.bincount(kq, minlength=6) / len(kq)
        exact = km_pmf(PredictionQuery(half_half, 2, 1, 5)).probs
        assert tv_distance(emp, exact) <= 0.01


class TestSeatingRuleFactorizesEppf:
    def test_all_trajectories_n6(self):
        # replaying the one-step probabilities along any seating order must
        # reproduce the exact partition probability, in rational arithmetic
        rp = oracle.RationalParams(Fraction(1, 2), Fraction(1, 2))
        a, th = rp.alpha, rp.theta

        def trajectory_prob(labels):
            sizes = []
            prob = Fraction(1)
            for i, lab in enumerate(labels):
                denom = th + i
                if lab == len(sizes):
                    if i > 0:
                        prob *= (th + len(sizes) * a) / denom
                    sizes.append(1)
                else:
                    prob *= (sizes[lab] - a) / denom
                    sizes[lab] += 1
            return prob, sizes

        def all_rgs(n):
            def walk(rgs, mx):
                if len(rgs) == n:
                    yield tuple(rgs)
                    return
                for lab in range(mx + 2):
                    yield from walk(rgs + [lab], max(mx, lab))

            yield from walk([0], 0)

        total = Fraction(0)
        for labels in all_rgs(6):
            prob, sizes = trajectory_prob(labels)
            assert prob == oracle.exact_eppf(rp, sizes)
            total += prob
        assert total == 1

    def test_empirical_matches_exact_partition_law(self, half_half):
        # the kernels implement the same rule: empirical block-count law at
        # n=6 agrees with the exact one
        ks = sim.crp_kn_batch(half_half, 6, 60_000, 9)
        emp = np.bincount(ks, minlength=7)[1:] / len(ks)
        assert tv_distance(emp, kn_pmf(half_half, 6).probs) <= 0.01


class TestConcatenationIdentity:
    def test_pilot_plus_continuation_equals_single_run(self, half_half):
        # K_{n+m} assembled from a pilot and its continuation has the same
        # law as a single (n+m)-customer run
        runs = 100_000
        rng = np.random.default_rng(123)
        from pdrich.backend import kernels

        u_pilot = rng.random((runs, 7))
        sizes, kv = kernels.crp_sizes_batch(0.5, 0.5, 8, u_pilot)
        u_cont = rng.random((runs, 6))
        knew, _ = kernels.continue_counts_var(sizes, kv, 0.5, 0.5, 6, u_cont)
        combined = kv + knew
        direct = sim.crp_kn_batch(half_half, 14, runs, 321)
        emp_a = np.bincount(combined, minlength=15)[1:] / runs
        emp_b = np.bincount(direct, minlength=15)[1:] / runs
        assert tv_distance(emp_a, emp_b) <= 0.01


class TestPilotSufficiency:
    def test_multiplicities_beyond_nk_do_not_matter(self, half_half):
        # states (3,1) and (2,2) share (n,k) = (4,2)
        kq_a, _ = sim.continue_batch(sim.SeatState((3, 1)), half_half, 6, 100_000, 5)
        kq_b, _ = sim.continue_batch(sim.SeatState((2, 2)), half_half, 6, 100_000, 6)
        emp_a = np.bincount(kq_a, minlength=7) / len(kq_a)
        emp_b = np.bincount(kq_b, minlength=7) / len(kq_b)
        assert tv_distance(emp_a, emp_b) <= 0.01
        exact = km_pmf(PredictionQuery(half_half, 4, 2, 6)).probs
        assert tv_distance(emp_a, exact) <= 0.01


class TestDeletionCheck:
    def test_passes_under_true_null(self, half_half):
        rep = sim.deletion_check(half_half, 2, 1, 6, 30_000, 45)
        assert rep.passed
        assert rep.null_theta == pytest.approx(1.0)
        trivial = [r for r in rep.strata if r.trivial]
        assert {r.s for r in trivial} == {0, 1}
        assert all(r.p_value == 1.0 for r in trivial)

    def test_wrong_null_is_rejected(self, half_half):
        rep = sim.deletion_check(half_half, 2, 1, 6, 30_000, 45, null_theta=0.5)
        assert len(rep.rejected) >= 1

    def test_deterministic(self, half_half):
        a = sim.deletion_check(half_half, 2, 1, 4, 5_000, 77)
        b = sim.deletion_check(half_half, 2, 1, 4, 5_000, 77)
        assert a == b

    def test_stratum_floor_signalled(self, half_half):
        with pytest.raises(sim.InsufficientStratumSamples):
            sim.deletion_check(half_half, 2, 1, 6, 200, 45, min_stratum=100)

    def test_negligible_conditioning_mass_rejected(self, half_half):
        with pytest.raises(ValueError):
            sim.deletion_check(half_half, 40, 40, 2, 100, 0)

    def test_budget_exceeded_signalled(self):
        # P(K_30 = 30) is tiny but above the mass cutoff at alpha = 0.9
        p = PDParams(0.9, 5.0)
        with pytest.raises(sim.ConditioningBudgetExceeded):
            sim.deletion_check(p, 30, 5, 2, 10_000, 0, max_attempts=40_000)


class TestBatchDeterminism:
    def test_same_seed_same_draws(self, half_half):
        a = sim.crp_kn_batch(half_half, 20, 10_000, 99)
        b = sim.crp_kn_batch(half_half, 20, 10_000, 99)
        assert np.array_equal(a, b)
        ka, sa = sim.continue_batch(sim.SeatState((2, 1)), half_half, 7, 5_000, 98)
        kb, sb = sim.continue_batch(sim.SeatState((2, 1)), half_half, 7, 5_000, 98)
        assert np.array_equal(ka, kb) and np.array_equal(sa, sb)
