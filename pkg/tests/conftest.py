import numpy as np
import pytest

from geodesic_coder import boundary, build


@pytest.fixture(scope="session")
def g2():
    return build(2)


@pytest.fixture(scope="session")
def g3():
    return build(3)


@pytest.fixture(scope="session")
def mid(g2):
    part = boundary.parse_partition(g2, "midpoints")
    return part, boundary.attractor(g2, part)


@pytest.fixture(scope="session")
def mid3(g3):
    part = boundary.parse_partition(g3, "midpoints")
    return part, boundary.attractor(g3, part)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
