import json

import pytest

from gpsing.common.errors import RegimeViolation, UsageError
from gpsing.common.problem import PotentialSpec
from gpsing.utils.config import DEFAULT_OUT_DIR, OUT_DIR_ENV, SUITES, parse_config


def test_defaults(monkeypatch):
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)
    config = parse_config(["wprofile", "--N", "1", "--p", "2", "--b", "0.5"])
    assert (config.rmax, config.nodes, config.grading) == (20.0, 4001, 2.0)
    assert config.potential == PotentialSpec.harmonic()
    assert config.out_dir == DEFAULT_OUT_DIR
    assert config.suites == SUITES
    assert config.flow.scheme == "semi_implicit"
    assert config.params.N == 1


def test_regime_checked_before_solving():
    with pytest.raises(RegimeViolation) as excinfo:
        parse_config(["sweep", "--p", "2", "--b", "1", "--N", "2"])
    assert excinfo.value.field == "p"


def test_regime_checked_for_every_sweep_value():
    with pytest.raises(RegimeViolation):
        parse_config(["sweep", "--M-list", "10,-5"])


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"nodes": 2001, "rmax": 30, "flow": {"max_iters": 50, "tol_energy": 1e-8}}))
    config = parse_config(["sweep", "--config", str(path), "--nodes", "8001", "--tol-energy", "1e-9"])
    assert config.nodes == 8001
    assert config.rmax == 30
    assert config.flow.max_iters == 50
    assert config.flow.tol_energy == 1e-9


def test_unknown_config_key(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"nodez": 10}))
    with pytest.raises(UsageError):
        parse_config(["sweep", "--config", str(path)])


def test_malformed_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("{not json")
    with pytest.raises(UsageError):
        parse_config(["sweep", "--config", str(path)])


def test_M_list_and_potential():
    config = parse_config(["sweep", "--M-list", "10,100,1e3", "--potential", "zero", "--workers", "2"])
    assert config.M_list == (10.0, 100.0, 1000.0)
    assert config.potential.is_zero
    assert config.workers == 2
    with pytest.raises(UsageError):
        parse_config(["sweep", "--M-list", "100,10"])
    with pytest.raises(UsageError):
        parse_config(["sweep", "--M-list", "ten"])


def test_suites():
    config = parse_config(["verify", "--suite", "gn", "--suite", "pohozaev,gn"])
    assert config.suites == ("gn", "pohozaev")
    assert parse_config(["verify", "--suite", "all"]).suites == SUITES
    with pytest.raises(UsageError):
        parse_config(["verify", "--suite", "everything"])


@pytest.mark.parametrize("argv", [
    ["explode"], ["sweep", "--scheme", "leapfrog"], ["sweep", "--nodes", "many"], ["sweep", "--workers", "0"],
    ["sweep", "--dt", "-1"],
])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_config(argv)


def test_out_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
    assert parse_config(["wprofile"]).out_dir == str(tmp_path)
    assert parse_config(["wprofile", "--out", "elsewhere"]).out_dir == "elsewhere"


def test_as_dict_is_json_ready():
    config = parse_config(["plotdata", "--kind", "ratio"])
    data = json.loads(json.dumps(config.as_dict()))
    assert data["kind"] == "ratio"
    assert data["potential"] == "power:1,2"
    assert data["flow"]["max_iters"] == 20000
