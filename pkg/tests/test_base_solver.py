import pytest

from gpsing.algorithms.common.base_solver import BaseSolver
from gpsing.common.problem import validate_params
from gpsing.common.radial_grid import build_grid


class _Constant(BaseSolver):
    def reset(self):
        self.calls = 0

    def solve(self):
        self.calls += 1
        return self.calls


def test_abstract_methods_required():
    with pytest.raises(TypeError):
        BaseSolver(validate_params(1, 2, 0.5), build_grid(1, 1, 11))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        _Constant(validate_params(1, 2, 0.5), build_grid(2, 1, 11))


def test_subclass_runs():
    solver = _Constant(validate_params(1, 2, 0.5), build_grid(1, 1, 11))
    solver.reset()
    assert solver.solve() == 1
    assert solver.name == "Base Solver"
