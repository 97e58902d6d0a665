import hypothesis
import pytest
from hypothesis import strategies as st

from tcladder import SystemParams, build_basis

hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=150, deadline=None)
hypothesis.settings.load_profile("fast")


def rate_strategy(lo=0.0, hi=4.0):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False, allow_infinity=False)


@st.composite
def params_strategy(draw, deltas=(0.0, 0.5, -0.5)):
    return SystemParams(
        omega0=10.0,
        delta=draw(st.sampled_from(deltas)),
        g=1.0,
        gamma_a=draw(rate_strategy()),
        gamma_sigma=draw(rate_strategy()),
    )


@pytest.fixture(scope="session")
def basis2():
    return build_basis(2)


@pytest.fixture(scope="session")
def basis3():
    return build_basis(3)


@pytest.fixture()
def params():
    return SystemParams(omega0=10.0, delta=0.0, g=1.0, gamma_a=0.4, gamma_sigma=0.4)
