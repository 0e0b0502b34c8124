import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

from gpsing.common.errors import ProfileMissing, UsageError
from gpsing.common.problem import validate_params
from gpsing.common.radial_grid import RadialField, build_grid, h1_seminorm_sq
from gpsing.experiments.asymptotics import (
    ASSUMPTIONS,
    CSV_COLUMNS,
    ScalingReport,
    ScalingRow,
    profile_convergence,
    uniform_bounds_check,
)


def _row(M, ratio, trap_mass, mu_eps2, sup_dist, grad_sq=0.5, sing_mass=0.75):
    return ScalingRow(M=M, I_M=ratio * M, ratio=ratio, trap_mass=trap_mass, eps=M ** -0.5, mu_eps2=mu_eps2,
                      sup_dist=sup_dist, h1_dist=2 * sup_dist, sing_mass=sing_mass, decay_rate=0.9,
                      converged=True, grad_sq=grad_sq)


@pytest.fixture
def report():
    rows = [
        _row(10.0, -0.40, 0.10, -0.80, 0.05),
        _row(100.0, -0.48, 0.02, -0.95, 0.01),
        ScalingRow.failed(1000.0, 0.03, "FlowDiverged: no descent"),
    ]
    return ScalingReport(params=validate_params(1, 2, 0.5), a_star=1.0, potential="power:1,2", rows=rows)


def test_frame_has_fixed_columns(report):
    frame = report.to_frame()
    assert list(frame.columns) == CSV_COLUMNS
    assert len(frame) == 3
    extended = report.to_frame(extended=True)
    assert "error" in extended.columns and "w_k" not in extended.columns


def test_failed_rows_are_kept(report):
    failed = report.rows[-1]
    assert not failed.converged
    assert math.isnan(failed.I_M)
    assert failed.eps == 0.03
    assert len(report.converged_rows) == 2


def test_csv_layout(report, tmp_path):
    path = report.to_csv(str(tmp_path / "sweep.csv"))
    with open(path, newline="") as f:
        text = f.read()
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 4
    assert lines[1].startswith("10,")


def test_json_report(report, tmp_path):
    path = report.to_json(str(tmp_path / "sweep.json"))
    with open(path) as f:
        data = json.load(f)
    assert data["lambda0"] == pytest.approx(0.5)
    assert data["metadata"]["assumptions"] == ASSUMPTIONS
    assert data["rows"][2]["I_M"] is None
    assert data["rows"][2]["error"].startswith("FlowDiverged")


def test_trends(report):
    trends = report.trends()
    assert trends["ratio_error_decreasing"]
    assert trends["trap_mass_decreasing"]
    assert trends["multiplier_error_decreasing"]
    assert trends["sup_dist_decreasing"]


def test_uniform_bounds(report):
    bounds = uniform_bounds_check(report)
    assert bounds["bounded"]
    assert bounds["grad_min"] == bounds["grad_max"] == 0.5
    # 2 / 3 * 0.75 / 0.5 = 1 against the limit 4 / (N(p-1) + 2b) = 2
    assert bounds["pohozaev_limit"] == pytest.approx(2.0)
    assert bounds["pohozaev_ratio"] == pytest.approx([0.5, 0.5])
    assert bounds["final_ratio_error"] == pytest.approx(0.5)


def test_uniform_bounds_needs_two_rows(report):
    report.rows = report.rows[:1]
    with pytest.raises(UsageError):
        uniform_bounds_check(report)


def test_uniform_bounds_against_profile_gradient(report):
    field = RadialField.from_function(build_grid(1, rmax=10, nodes=201), lambda r: np.exp(-r * r))
    profile = SimpleNamespace(normalized_profile=field)
    bounds = uniform_bounds_check(report, profile)
    limit = h1_seminorm_sq(field)
    assert bounds["gradient_limit"] == pytest.approx(limit)
    assert bounds["gradient_error"] == pytest.approx([abs(0.5 - limit) / limit] * 2)
    assert "gradient_error" not in uniform_bounds_check(report)


def test_uniform_bounds_flags_degenerate_rows(report):
    report.rows[0].grad_sq = 0.0
    assert not uniform_bounds_check(report)["bounded"]


def test_profile_convergence_requires_profile(report):
    with pytest.raises(ProfileMissing):
        profile_convergence(report, None)


def test_empty_report_frame():
    empty = ScalingReport(params=validate_params(1, 2, 0.5), a_star=1.0, potential="zero")
    assert list(empty.to_frame().columns) == CSV_COLUMNS
    assert empty.trends() == {}
    assert np.isclose(empty.lambda0, 0.5)
