import math

import pytest
from hypothesis import given, strategies as st

from pdrich.logspace import (
    NEG_INF,
    SignedLog,
    log_add,
    log_choose,
    log_gen_rising,
    log_rising,
    log_sum,
    signed_log_sum,
)

finite_logs = st.floats(min_value=-500.0, max_value=500.0)
reals = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


class TestLogAdd:
    def test_zero_identity(self):
        assert log_add(NEG_INF, 3.5) == 3.5
        assert log_add(3.5, NEG_INF) == 3.5
        assert log_add(NEG_INF, NEG_INF) == NEG_INF

    def test_matches_direct(self):
        assert log_add(math.log(2), math.log(3)) == pytest.approx(math.log(5), rel=1e-15)

    def test_no_overflow(self):
        # direct exp would overflow; max-shifted form must not
        assert log_add(1000.0, 1000.0) == pytest.approx(1000.0 + math.log(2))
        assert log_add(1e308, 1.0) == 1e308

    @given(finite_logs, finite_logs)
    def test_commutative(self, a, b):
        assert log_add(a, b) == log_add(b, a)


class TestLogSum:
    def test_empty_and_all_zero(self):
        assert log_sum([]) == NEG_INF
        assert log_sum([NEG_INF, NEG_INF]) == NEG_INF

    def test_matches_pairwise(self):
        vals = [0.1, -2.0, 3.0, NEG_INF]
        acc = NEG_INF
        for v in vals:
            acc = log_add(acc, v)
        assert log_sum(vals) == pytest.approx(acc, rel=1e-14)


class TestLogRising:
    def test_integer_cases(self):
        assert log_rising(2.0, 3) == pytest.approx(math.log(24), rel=1e-14)
        assert log_rising(5.0, 0) == 0.0

    def test_real_increment(self):
        # (x)_b = Gamma(x+b)/Gamma(x) also for non-integer b
        assert log_rising(2.5, 0.5) == pytest.approx(
            math.lgamma(3.0) - math.lgamma(2.5), rel=1e-14
        )

    def test_rejects_nonpositive_base(self):
        with pytest.raises(ValueError):
            log_rising(0.0, 2)
        with pytest.raises(ValueError):
            log_rising(-1.0, 2)


class TestLogGenRising:
    @given(
        st.floats(min_value=0.05, max_value=50.0),
        st.integers(min_value=0, max_value=12),
        st.floats(min_value=0.05, max_value=3.0),
    )
    def test_matches_direct_product(self, x, s, step):
        direct = 1.0
        for i in range(s):
            direct *= x + i * step
        assert math.exp(log_gen_rising(x, s, step)) == pytest.approx(direct, rel=1e-11)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            log_gen_rising(-1.0, 2, 0.5)
        with pytest.raises(ValueError):
            log_gen_rising(1.0, 2, 0.0)


def test_log_choose():
    assert log_choose(5, 2) == pytest.approx(math.log(10), rel=1e-14)
    assert log_choose(5, 0) == 0.0
    assert log_choose(5, 6) == NEG_INF
    assert log_choose(5, -1) == NEG_INF


class TestSignedLog:
    @given(reals)
    def test_roundtrip(self, x):
        # exp(log(x)) carries relative error ~ eps * |log x|, up to ~2e-13
        # at the extremes of double range
        assert SignedLog.from_real(x).to_real() == pytest.approx(x, rel=1e-12, abs=1e-300)

    def test_exact_zero(self):
        z = SignedLog.from_real(0.0)
        assert z.sign == 0
        assert z.to_real() == 0.0
        # zero annihilates products
        assert (z * SignedLog.from_real(7.0)).sign == 0
        assert (SignedLog.from_real(-3.0) * z).to_real() == 0.0

    def test_zero_equals_itself(self):
        assert SignedLog.zero() == SignedLog.zero()

    @given(reals, reals)
    def test_product_signs(self, x, y):
        prod = SignedLog.from_real(x) * SignedLog.from_real(y)
        assert prod.to_real() == pytest.approx(x * y, rel=1e-12, abs=1e-290)

    def test_scaled(self):
        v = SignedLog.from_real(-2.0).scaled(math.log(3.0))
        assert v.to_real() == pytest.approx(-6.0, rel=1e-14)
        assert SignedLog.zero().scaled(1.0).sign == 0


class TestSignedLogSum:
    def test_exact_cancellation(self):
        out = signed_log_sum([SignedLog.from_real(1.0), SignedLog.from_real(-1.0)])
        assert out.sign == 0

    def test_mixed_signs(self):
        terms = [SignedLog.from_real(v) for v in (3.0, -1.0, 0.5)]
        assert signed_log_sum(terms).to_real() == pytest.approx(2.5, rel=1e-14)

    def test_all_zero(self):
        assert signed_log_sum([SignedLog.zero(), SignedLog.zero()]).sign == 0

    @given(st.lists(st.floats(min_value=-100.0, max_value=100.0), min_size=1, max_size=20))
    def test_matches_direct_sum(self, xs):
        want = sum(xs)
        got = signed_log_sum([SignedLog.from_real(x) for x in xs]).to_real()
        scale = max(abs(x) for x in xs)
        assert got == pytest.approx(want, abs=1e-12 * max(scale, 1.0))
