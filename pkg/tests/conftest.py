import numpy as np
import pytest

from shrinklab.grid import SphereCap, discretize, make_grid


@pytest.fixture(scope="session")
def cap161():
    spec = make_grid(2, 1.2, 161)
    return discretize(SphereCap(2), spec)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
