import pytest
from hypothesis import HealthCheck, settings

import coalgame as cg
from coalgame import fixtures

settings.register_profile(
    "det",
    derandomize=True,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
    deadline=None,
)
settings.load_profile("det")


@pytest.fixture(scope="session")
def g1():
    return cg.load_game(fixtures.g1())


@pytest.fixture(scope="session")
def g2():
    return cg.load_game(fixtures.g2())


@pytest.fixture(scope="session")
def g3():
    return cg.load_game(fixtures.g3(10.0))


@pytest.fixture(scope="session")
def g4():
    return cg.load_game(fixtures.g4())


@pytest.fixture(scope="session")
def g5():
    return cg.load_game(fixtures.g5())


# G3 strategy indices implied by the documented enumeration order (allocations
# ascend lexicographically over incident edges in listing order):
#   B's edges are [A-B, B-C]; (0,1) = middle edge first => index 0 is "mid".
#   C's edges are [B-C, C-D]; (0,1) = outer edge first  => index 1 is "mid".
G3_MID_MID = (0, 0, 1, 0)
G3_OUTER_OUTER = (0, 1, 0, 0)


@pytest.fixture(scope="session")
def g3_profiles():
    return {"mid_mid": G3_MID_MID, "outer_outer": G3_OUTER_OUTER}
