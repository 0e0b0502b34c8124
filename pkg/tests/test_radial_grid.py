import math
import warnings

import numpy as np
import pytest

from gpsing.common.errors import BadGridSpec, GridMismatch, WeightNotIntegrable
from gpsing.common.radial_grid import (
    RadialField,
    TruncationWarning,
    build_grid,
    check_boundary,
    h1_distance,
    h1_seminorm_sq,
    integrate,
    l2_norm_sq,
    rescale,
    sup_distance,
)


def test_build_grid_nodes():
    assert build_grid(1, rmax=1, nodes=3, grading=1).r == pytest.approx([0, 0.5, 1])
    assert build_grid(1, rmax=1, nodes=3, grading=2).r == pytest.approx([0, 0.25, 1])
    grid = build_grid(3, rmax=20, nodes=4001, grading=2)
    assert grid.r[1] == pytest.approx(1.25e-6)
    assert grid.r[-1] == 20.0
    assert np.all(np.diff(grid.r) > 0)


@pytest.mark.parametrize("kwargs", [
    {"nodes": 2}, {"rmax": 0.0}, {"rmax": -1.0}, {"grading": 0.5},
])
def test_build_grid_rejects(kwargs):
    spec = {"N": 1, "rmax": 1.0, "nodes": 11, "grading": 2.0}
    spec.update(kwargs)
    with pytest.raises(BadGridSpec):
        build_grid(**spec)


def test_surface_constants():
    assert build_grid(1, 1, 3).surface_const == pytest.approx(2.0)
    assert build_grid(2, 1, 3).surface_const == pytest.approx(2 * math.pi)
    assert build_grid(3, 1, 3).surface_const == pytest.approx(4 * math.pi)


def test_integrate_constant_with_singular_weight():
    grid = build_grid(3, rmax=1, nodes=51)
    assert integrate(RadialField(grid, np.ones(51)), -0.5) == pytest.approx(4 * math.pi / 2.5, rel=1e-10)
    grid = build_grid(1, rmax=1, nodes=51)
    assert integrate(RadialField(grid, np.ones(51)), -0.5) == pytest.approx(4.0, rel=1e-10)


def test_integrate_exact_for_piecewise_linear():
    grid = build_grid(2, rmax=2, nodes=7, grading=1.5)
    field = RadialField(grid, 3.0 - grid.r)
    # 2 pi int_0^2 (3 - r) r dr
    assert integrate(field) == pytest.approx(2 * math.pi * (6 - 8 / 3), rel=1e-12)


def test_weight_not_integrable():
    grid = build_grid(1, rmax=1, nodes=11)
    with pytest.raises(WeightNotIntegrable):
        grid.weights(-1.0)


def test_gaussian_integral():
    grid = build_grid(1, rmax=20, nodes=4001, grading=1)
    field = RadialField.from_function(grid, lambda r: np.exp(-2 * r ** 2))
    assert integrate(field) == pytest.approx(math.sqrt(math.pi / 2), abs=1e-8)


def test_quadrature_second_order():
    def error(nodes):
        grid = build_grid(3, rmax=6, nodes=nodes, grading=2)
        field = RadialField.from_function(grid, lambda r: np.exp(-r ** 2))
        return abs(integrate(field) - math.pi ** 1.5)

    assert error(101) / error(201) >= 3.5


def test_norms_of_gaussian():
    grid = build_grid(1, rmax=10, nodes=4001)
    field = RadialField.from_function(grid, lambda r: np.exp(-0.5 * r ** 2))
    assert l2_norm_sq(field) == pytest.approx(math.sqrt(math.pi), rel=1e-6)
    assert h1_seminorm_sq(field) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-4)
    zero = RadialField(grid, np.zeros(grid.nodes))
    assert l2_norm_sq(zero) == 0 and h1_seminorm_sq(zero) == 0


def test_field_rejects_bad_values():
    grid = build_grid(1, rmax=1, nodes=5)
    with pytest.raises(GridMismatch):
        RadialField(grid, np.ones(4))
    with pytest.raises(ValueError):
        RadialField(grid, np.array([1.0, np.nan, 0.0, 0.0, 0.0]))


def test_rescale_identity_and_mass():
    grid = build_grid(1, rmax=20, nodes=4001, grading=1)
    field = RadialField.from_function(grid, lambda r: np.exp(-(r / 0.3) ** 2)).normalized()
    assert np.array_equal(rescale(field, 1.0).values, field.values)
    for eps in (0.1, 0.5, 1.0):
        assert l2_norm_sq(rescale(field, eps)) == pytest.approx(1.0, abs=1e-6)
    assert np.all(rescale(field, 0.3).values >= 0)


def test_rescale_composes():
    grid = build_grid(1, rmax=20, nodes=4001)
    field = RadialField.from_function(grid, lambda r: np.exp(-r ** 2))
    twice = rescale(rescale(field, 0.5), 0.4)
    once = rescale(field, 0.2)
    assert sup_distance(twice, once) < 1e-5


def test_rescale_onto_scaled_grid_is_exact():
    grid = build_grid(1, rmax=20, nodes=401)
    field = RadialField.from_function(grid, lambda r: np.exp(-r))
    fine = grid.scaled(0.25)
    lifted = rescale(RadialField(fine, field.values), 0.25, grid)
    assert lifted.values == pytest.approx(0.25 ** 0.5 * field.values, rel=1e-14, abs=0)


def test_distances():
    grid = build_grid(1, rmax=1, nodes=11)
    one = RadialField(grid, np.ones(11))
    zero = RadialField(grid, np.zeros(11))
    assert sup_distance(one, one) == 0
    assert sup_distance(one, zero) == 1
    assert h1_distance(one, zero) == pytest.approx(2.0 ** 0.5)
    with pytest.raises(GridMismatch):
        sup_distance(one, RadialField(build_grid(1, rmax=2, nodes=11), np.ones(11)))


def test_check_boundary_warns_on_undecayed_field():
    grid = build_grid(1, rmax=2, nodes=21)
    with pytest.warns(TruncationWarning):
        assert not check_boundary(RadialField.from_function(grid, lambda r: np.exp(-r)))
    assert check_boundary(RadialField(grid, np.zeros(21)))


def test_check_boundary_relative_to_amplitude():
    grid = build_grid(1, rmax=25, nodes=101)
    tall = RadialField.from_function(grid, lambda r: 1e4 * np.exp(-r))
    with pytest.warns(TruncationWarning):
        assert not check_boundary(tall)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_boundary(tall, relative=True)
