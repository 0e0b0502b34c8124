import numpy as np
import pytest

from gpsing.algorithms.profile.ground_state import gn_ratio, pohozaev_residual, singular_integral
from gpsing.algorithms.profile.shooting import solve_w_shooting
from gpsing.common.errors import ZeroField
from gpsing.common.problem import validate_params
from gpsing.common.radial_grid import RadialField, build_grid, h1_seminorm_sq, l2_norm_sq, rescale

pytestmark = pytest.mark.slow


def test_kinetic_to_mass_ratio(w_flow):
    ratio = h1_seminorm_sq(w_flow.profile) / l2_norm_sq(w_flow.profile)
    assert ratio == pytest.approx(0.5, rel=1e-3)
    assert w_flow.constants.kinetic_ratio == pytest.approx(0.5)


def test_singular_mass_identity(w_flow):
    assert singular_integral(w_flow.profile, w_flow.params) == pytest.approx(1.5 * w_flow.a_star, rel=1e-3)


def test_pohozaev_fails_off_solution(w_flow):
    res1, res2 = pohozaev_residual(2 * w_flow.profile, w_flow.params)
    assert res1 > 0.1
    assert max(w_flow.pohozaev_res) < 1e-3


def test_gn_ratio_equality_at_w(w_flow):
    c_gn = w_flow.constants.c_gn
    assert gn_ratio(w_flow.profile, w_flow.params, c_gn) == pytest.approx(1.0, abs=1e-3)
    for eps in (0.5, 0.8):
        assert gn_ratio(rescale(w_flow.profile, eps), w_flow.params, c_gn) == pytest.approx(1.0, abs=1e-3)


def test_gn_ratio_below_one_for_gaussian(w_flow, reference_grid):
    gaussian = RadialField.from_function(reference_grid, lambda r: np.exp(-r ** 2))
    assert gn_ratio(gaussian, w_flow.params, w_flow.constants.c_gn) < 1.0


def test_gn_ratio_zero_field(case_a):
    grid = build_grid(1, rmax=1, nodes=11)
    with pytest.raises(ZeroField):
        gn_ratio(RadialField(grid, np.ones(11)), case_a, 1.0)


def test_header(w_flow):
    header = w_flow.header()
    assert header["a_star"] == w_flow.a_star
    assert header["method"] == "flow"
    assert set(header) == {"N", "p", "b", "a_star", "w0", "pohozaev_res", "decay", "method"}


@pytest.mark.parametrize("N, p, b", [(1, 2.0, 0.5), (2, 1.5, 0.8), (3, 1.2, 0.5)])
def test_shooting_pohozaev_across_dimensions(N, p, b):
    params = validate_params(N, p, b)
    profile = solve_w_shooting(params, build_grid(N, rmax=20, nodes=4001))
    res1, res2 = profile.pohozaev_res
    assert res1 <= 1e-4
    assert res2 <= 1e-4
    ratio = h1_seminorm_sq(profile.profile) / l2_norm_sq(profile.profile)
    assert ratio == pytest.approx(profile.constants.kinetic_ratio, rel=1e-3)
