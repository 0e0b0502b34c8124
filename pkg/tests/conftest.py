import pytest

from gpsing.algorithms.profile.flow_route import solve_w_flow
from gpsing.algorithms.profile.shooting import solve_w_shooting
from gpsing.common.problem import validate_params
from gpsing.common.radial_grid import build_grid

# Case A: N = 1, p = 2, b = 0.5, so lambda0 = 0.5, beta_energy = 1, beta_length = 0.5.
CASE_A = (1, 2.0, 0.5)
TEST_NODES = 2001


@pytest.fixture(scope="session")
def case_a():
    return validate_params(*CASE_A)


@pytest.fixture(scope="session")
def reference_grid():
    return build_grid(1, rmax=20.0, nodes=TEST_NODES)


@pytest.fixture(scope="session")
def w_flow(case_a, reference_grid):
    return solve_w_flow(case_a, reference_grid)


@pytest.fixture(scope="session")
def w_shooting(case_a, reference_grid):
    return solve_w_shooting(case_a, reference_grid)
