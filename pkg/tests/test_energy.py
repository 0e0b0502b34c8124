import math

import numpy as np
import pytest

from gpsing.algorithms.minimization.energy import DiscreteEnergy, evaluate_E
from gpsing.common.problem import PotentialSpec, validate_params
from gpsing.common.radial_grid import RadialField, build_grid, h1_seminorm_sq, l2_norm_sq


@pytest.fixture
def gaussian():
    grid = build_grid(1, rmax=10, nodes=4001)
    return RadialField.from_function(grid, lambda r: np.exp(-0.5 * r ** 2)).normalized()


def test_parts_of_normalized_gaussian(gaussian):
    params = validate_params(1, 2, 0.5, 1)
    parts = evaluate_E(gaussian, params, PotentialSpec.harmonic())
    # u = pi^{-1/4} exp(-r^2 / 2): kinetic = trap = 1/2
    assert parts.kinetic == pytest.approx(0.5, rel=1e-4)
    assert parts.trap == pytest.approx(0.5, rel=1e-4)
    assert parts.coefficient == pytest.approx(2 / 3)
    assert parts.total == pytest.approx(parts.kinetic + parts.trap - parts.coefficient * parts.interaction)
    assert parts.kinetic == pytest.approx(h1_seminorm_sq(gaussian), rel=1e-12)


def test_trap_free_energy_is_kinetic_minus_interaction(gaussian):
    parts = evaluate_E(gaussian, validate_params(1, 2, 0.5, 4), PotentialSpec.zero())
    assert parts.trap == 0
    assert parts.coefficient == pytest.approx(2 * 4 ** 0.5 / 3)
    assert parts.total < parts.kinetic


def test_interaction_integral_matches_closed_form(gaussian):
    # int u^3 |x|^{-1/2} dx = 2 pi^{-3/4} int_0^inf exp(-3 r^2 / 2) r^{-1/2} dr
    expected = 2 * math.pi ** -0.75 * 0.5 * math.gamma(0.25) * (1.5 ** -0.25)
    parts = evaluate_E(gaussian, validate_params(1, 2, 0.5), PotentialSpec.zero())
    assert parts.interaction == pytest.approx(expected, rel=1e-4)


def test_norm_and_normalize(gaussian):
    energy = DiscreteEnergy(gaussian.grid, validate_params(1, 2, 0.5), PotentialSpec.zero())
    assert energy.norm_sq(gaussian.values) == pytest.approx(l2_norm_sq(gaussian))
    assert energy.norm_sq(energy.normalize(3 * gaussian.values)) == pytest.approx(1.0, abs=1e-12)


def test_stiffness_is_symmetric_and_annihilates_constants():
    grid = build_grid(3, rmax=2, nodes=41)
    energy = DiscreteEnergy(grid, validate_params(3, 1.2, 0.5), PotentialSpec.zero())
    assert np.allclose(energy.apply_stiffness(np.ones(41)), 0)
    x, y = np.random.default_rng(1).normal(size=(2, 41))
    assert x @ energy.apply_stiffness(y) == pytest.approx(y @ energy.apply_stiffness(x))
    assert x @ energy.apply_stiffness(x) == pytest.approx(float(np.dot(energy.stiffness, np.diff(x) ** 2)))


def test_multiplier_is_rayleigh_quotient(gaussian):
    energy = DiscreteEnergy(gaussian.grid, validate_params(1, 2, 0.5, 2), PotentialSpec.harmonic())
    values = gaussian.values
    expected = float(np.dot(energy.mass, energy.hamiltonian(values) * values)) / energy.norm_sq(values)
    assert energy.multiplier(values) == pytest.approx(expected, rel=1e-10)


def test_residual_small_for_harmonic_ground_state():
    # M tiny: the harmonic ground state exp(-r^2 / 2) is almost an eigenfunction with mu = 1
    grid = build_grid(1, rmax=10, nodes=4001)
    u = RadialField.from_function(grid, lambda r: np.exp(-0.5 * r ** 2)).normalized()
    energy = DiscreteEnergy(grid, validate_params(1, 2, 0.5, 1e-12), PotentialSpec.harmonic())
    mu, residual = energy.residual(u.values)
    assert mu == pytest.approx(1.0, rel=1e-4)
    assert residual < 1e-3
    wrong = RadialField.from_function(grid, lambda r: np.exp(-r ** 2)).normalized()
    assert energy.residual(wrong.values)[1] > 10 * residual
