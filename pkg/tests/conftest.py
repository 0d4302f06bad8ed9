import pytest

from semiact.cocycle import build_iterate_cocycle, build_product_cocycle, circle_cocycle
from semiact.dynamics import Shift, circle_system, counterexample_system, ledrappier_system, shift_system


@pytest.fixture(scope="session")
def shift():
    return shift_system()


@pytest.fixture(scope="session")
def led():
    return ledrappier_system()


@pytest.fixture(scope="session")
def circle():
    return circle_system()


@pytest.fixture(scope="session")
def counter():
    return counterexample_system()


@pytest.fixture(scope="session")
def omega_shift(shift):
    return build_iterate_cocycle(Shift(), shift)


@pytest.fixture(scope="session")
def omega_led(led):
    return build_product_cocycle(*led.endos, action=led)


@pytest.fixture(scope="session")
def omega_circle(circle):
    return circle_cocycle(circle)


@pytest.fixture(scope="session")
def omega_counter(counter):
    return build_product_cocycle(*counter.endos, check=False, action=counter)
