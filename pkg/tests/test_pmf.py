import math

import numpy as np
import pytest

from pdrich.pmf import Pmf, point_mass, tv_distance


class TestValidation:
    def test_rejects_entry_above_one(self):
        with pytest.raises(ValueError, match="exceeds 1"):
            Pmf(0, np.array([0.5, math.log(2.0)]))

    def test_rejects_bad_total(self):
        with pytest.raises(ValueError, match="sum"):
            Pmf(0, np.log(np.array([0.5, 0.4])))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Pmf(0, np.array([]))

    def test_clamps_float_dust(self):
        # log probs may poke above 0 by rounding; they are clamped, not rejected
        pmf = Pmf(0, np.array([4e-16, -math.inf]))
        assert pmf.prob(0) == 1.0


class TestViews:
    def test_support_and_lookup(self):
        pmf = Pmf(3, np.log(np.array([0.25, 0.75])))
        assert list(pmf.support) == [3, 4]
        assert pmf.support_max == 4
        assert pmf.prob(4) == pytest.approx(0.75)
        assert pmf.prob(2) == 0.0
        assert pmf.prob(99) == 0.0

    def test_moments(self):
        pmf = Pmf(0, np.log(np.array([0.6, 0.4])))
        assert pmf.mean() == pytest.approx(0.4)
        assert pmf.moment(2) == pytest.approx(0.4)

    def test_mass_between(self):
        pmf = Pmf(1, np.log(np.array([0.2, 0.3, 0.5])))
        assert pmf.mass_between(1, 2) == pytest.approx(0.5)
        assert pmf.mass_between(0, 10) == pytest.approx(1.0)
        assert pmf.mass_between(3, 2) == 0.0

    def test_point_mass(self):
        pmf = point_mass(7)
        assert pmf.prob(7) == 1.0
        assert pmf.mean() == 7.0

    def test_immutable_logs(self):
        pmf = point_mass(0)
        with pytest.raises(ValueError):
            pmf.log_probs[0] = 0.5


def test_tv_distance():
    assert tv_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert tv_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)
