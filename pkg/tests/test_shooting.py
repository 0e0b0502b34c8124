import numpy as np
import pytest

from gpsing.algorithms.profile.shooting import CROSSES, TURNS, ShootingSolver, solve_w_shooting
from gpsing.common.errors import BisectionStalled, NoBracket
from gpsing.common.problem import validate_params
from gpsing.common.radial_grid import build_grid


@pytest.fixture(scope="module")
def solver(case_a, reference_grid):
    return ShootingSolver(case_a, reference_grid)


def test_series_start(solver):
    w, dw = solver.series_start(1.3)
    assert w == pytest.approx(1.3, rel=1e-6)
    assert dw < 0


def test_trajectories_on_either_side(solver):
    assert solver.shoot(0.01)[0] == TURNS
    assert solver.shoot(100.0)[0] == CROSSES


@pytest.mark.parametrize("bracket", [(1.0, 1.0), (-1.0, 2.0), (50.0, 100.0)])
def test_bad_bracket(case_a, reference_grid, bracket):
    with pytest.raises(NoBracket):
        ShootingSolver(case_a, reference_grid, bracket=bracket).bisect()


def test_bisection_cap(case_a, reference_grid):
    with pytest.raises(BisectionStalled):
        ShootingSolver(case_a, reference_grid, max_bisections=2).bisect()


def test_three_dimensional_bracket_found():
    params = validate_params(3, 1.2, 0.5)
    solver = ShootingSolver(params, build_grid(3, rmax=20, nodes=401), w0_tol=1e-6)
    lo, hi = solver.bisect()
    assert 0 < lo < hi and hi - lo <= 1e-6


@pytest.mark.slow
def test_profile_is_positive_decreasing_and_decays(w_shooting):
    w = w_shooting.profile
    assert w_shooting.method == "shooting"
    assert w_shooting.w0 == pytest.approx(w.values[0])
    assert np.all(w.values > 0)
    assert w_shooting.diagnostics["monotone"]
    assert -1.1 <= -w_shooting.decay <= -0.9
    assert w_shooting.diagnostics["decay_quality"] >= 0.99
    lo, hi = w_shooting.diagnostics["bracket"]
    assert lo <= w_shooting.w0 <= hi


@pytest.mark.slow
def test_shooting_pohozaev(w_shooting):
    res1, res2 = w_shooting.pohozaev_res
    assert res1 < 1e-3
    assert res2 < 1e-3


@pytest.mark.slow
def test_explicit_bracket_reproduces_profile(case_a, reference_grid, w_shooting):
    lo, hi = w_shooting.diagnostics["bracket"]
    again = solve_w_shooting(case_a, reference_grid, bracket=(0.5 * lo, 2 * hi))
    assert again.w0 == pytest.approx(w_shooting.w0, abs=1e-10)
