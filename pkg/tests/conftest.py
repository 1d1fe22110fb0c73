import itertools

import pytest

from pdrich.prior import PDParams

ALPHAS = (0.25, 0.5, 0.75)
THETAS = (-0.1, 0.5, 2.0, 10.0)


def param_grid():
    """Valid (alpha, theta) pairs from the standard test grid."""
    return [
        PDParams(a, t)
        for a, t in itertools.product(ALPHAS, THETAS)
        if t > -a
    ]


@pytest.fixture(scope="session")
def params_grid():
    return param_grid()


@pytest.fixture
def half_half():
    return PDParams(0.5, 0.5)
