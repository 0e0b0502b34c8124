import json

import numpy as np
import pytest

from gpsing.common.errors import UsageError
from gpsing.common.radial_grid import build_grid
from gpsing.experiments.verification import SuiteResult, random_fields, verify_suites
from gpsing.utils.config import RunConfig, parse_config
from gpsing.utils.general import to_jsonable


@pytest.fixture(scope="module")
def default_verify(tmp_path_factory):
    out_dir = str(tmp_path_factory.mktemp("verify"))
    return out_dir, verify_suites(parse_config(["verify", "--out", out_dir]))


def _checks(report, suite):
    return {check["name"]: check for check in report["suites"][suite]["checks"]}


def test_suite_result_bookkeeping():
    suite = SuiteResult("demo")
    assert not suite.passed
    suite.at_most("small", 1e-5, 1e-4)
    suite.at_least("large", 2.0, 1.0)
    suite.holds("flag", True)
    assert suite.passed
    suite.at_most("too_big", float("nan"), 1.0)
    assert not suite.passed
    data = suite.as_dict()
    assert data["checks"][-1]["measured"] is None
    assert [check["passed"] for check in data["checks"]] == [True, True, True, False]


def test_random_fields_are_seeded_and_positive():
    grid = build_grid(1, rmax=20, nodes=201)
    first = random_fields(grid, seed=7, count=5)
    again = random_fields(grid, seed=7, count=5)
    other = random_fields(grid, seed=8, count=5)
    assert all(np.array_equal(a.values, b.values) for a, b in zip(first, again))
    assert not np.array_equal(first[0].values, other[0].values)
    assert all(np.all(field.values > 0) for field in first)


def test_unknown_suite():
    with pytest.raises(UsageError):
        verify_suites(RunConfig(command="verify", suites=("bogus",)))


@pytest.mark.slow
def test_profile_suites_pass():
    config = parse_config(["verify", "--suite", "gn,pohozaev", "--seed", "3"])
    status, report = verify_suites(config)
    gn = {check["name"]: check for check in report["suites"]["gn"]["checks"]}
    assert gn["max_random_ratio"]["passed"]
    assert gn["w_ratio_error"]["passed"]
    pohozaev = {check["name"]: check for check in report["suites"]["pohozaev"]["checks"]}
    assert pohozaev["residual_interaction"]["measured"] < 1e-3
    assert pohozaev["residual_mass"]["measured"] < 1e-3
    assert report["seed"] == 3
    assert status == (0 if report["passed"] else 4)


@pytest.mark.slow
def test_trap_free_scaling_suite():
    config = parse_config(["verify", "--suite", "scaling", "--potential", "zero", "--nodes", "2001"])
    status, report = verify_suites(config)
    assert status == 0
    assert report["suites"]["scaling"]["passed"]
    assert len(report["suites"]["scaling"]["checks"]) == 3


@pytest.mark.slow
def test_trap_free_concentration_suite():
    config = parse_config(["verify", "--suite", "concentration", "--potential", "zero"])
    status, report = verify_suites(config)
    checks = _checks(report, "concentration")
    assert status == 0
    assert checks["max_ratio_error"]["passed"]
    assert checks["max_gradient_error"]["passed"]
    assert "ratio_error_decreasing" not in checks
    assert "sup_dist_decreasing" not in checks


@pytest.mark.slow
def test_default_verify_passes_every_suite(default_verify):
    _, (status, report) = default_verify
    assert status == 0
    assert set(report["suites"]) == {"gn", "pohozaev", "scaling", "concentration", "decay", "multiplier", "crossval"}
    assert all(suite["passed"] for suite in report["suites"].values())


@pytest.mark.slow
@pytest.mark.parametrize("suite, names", [
    ("concentration", ["final_ratio_error", "ratio_error_decreasing", "final_trap_mass", "trap_mass_decreasing",
                       "final_sup_dist_relative", "sup_dist_decreasing", "sandwich_all_rows", "uniform_bounds",
                       "final_sing_mass_error", "cutoff_bound_margin"]),
    ("decay", ["w_rate_error", "final_row_rate", "final_row_fit_quality", "final_row_gradient_rate",
               "final_row_gradient_fit_quality"]),
    ("multiplier", ["tilde_mu_1_error", "final_multiplier_error", "multiplier_error_decreasing",
                    "multipliers_negative"]),
    ("crossval", ["a_star_relative", "sup_dist_over_w0"]),
])
def test_default_verify_named_checks(default_verify, suite, names):
    _, (_, report) = default_verify
    checks = _checks(report, suite)
    for name in names:
        assert checks[name]["passed"], checks[name]


@pytest.mark.slow
def test_verify_report_is_reproducible(default_verify):
    out_dir, (_, first) = default_verify
    _, again = verify_suites(parse_config(["verify", "--out", out_dir]))
    assert json.dumps(to_jsonable(again), sort_keys=True) == json.dumps(to_jsonable(first), sort_keys=True)
