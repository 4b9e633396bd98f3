import math

import pytest

from eulercells.profiles import make_rotational


@pytest.fixture(scope="session")
def sphere():
    return make_rotational("sin(r)", "1", math.pi, name="sphere")


@pytest.fixture(scope="session")
def flat_disc():
    return make_rotational("r", "1", 1.0, name="flat-disc")


@pytest.fixture(scope="session")
def hyperbolic():
    return make_rotational("sinh(r)", "cosh(r)", math.log(2.0), name="hyperbolic")
