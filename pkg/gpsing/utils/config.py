# gpsing/utils/config.py

import argparse
import json
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from gpsing.algorithms.minimization.gradient_flow import FlowConfig
from gpsing.common.errors import IOFailure, UsageError
from gpsing.common.problem import PotentialSpec, ProblemParams, validate_params
from gpsing.common.radial_grid import DEFAULT_GRADING, DEFAULT_NODES, DEFAULT_RMAX, RadialGrid, build_grid
from gpsing.simulation.sweep import DEFAULT_M_LIST
from gpsing.utils.io import PLOT_KINDS

COMMANDS = ("wprofile", "minimize", "sweep", "verify", "plotdata")
FORMATS = ("csv", "json", "plain")
METHODS = ("flow", "shooting", "cross")
SUITES = ("gn", "pohozaev", "scaling", "concentration", "decay", "multiplier", "crossval")
OUT_DIR_ENV = "GPSING_OUT_DIR"
DEFAULT_OUT_DIR = os.path.join(".data", "gpsing")

# Keys routed into FlowConfig rather than RunConfig.
FLOW_KEYS = ("dt", "max_iters", "tol_energy", "tol_residual", "scheme", "init")


@dataclass(frozen=True)
class RunConfig:
    """
    Fully resolved run configuration.

    Attributes:
        command: Subcommand.
        N, p, b, M: Problem parameters; M is the single-solve interaction strength.
        M_list: Interaction strengths of a sweep, increasing.
        potential: The trap.
        rmax, nodes, grading: Reference grid.
        flow: Gradient flow configuration.
        method: Route to w ("flow", "shooting" or "cross").
        out_dir: Output directory.
        format: Report format.
        suites: Verification suites to run.
        seed: Seed of the randomized GN suite.
        workers: Sweep worker processes.
        kind: Plot-data series for plotdata.
        log_level: Root logger level.
    """
    command: str
    N: int = 1
    p: float = 2.0
    b: float = 0.5
    M: float = 1.0
    M_list: Tuple[float, ...] = DEFAULT_M_LIST
    potential: PotentialSpec = field(default_factory=PotentialSpec.harmonic)
    rmax: float = DEFAULT_RMAX
    nodes: int = DEFAULT_NODES
    grading: float = DEFAULT_GRADING
    flow: FlowConfig = field(default_factory=FlowConfig)
    method: str = "flow"
    out_dir: str = DEFAULT_OUT_DIR
    format: str = "json"
    suites: Tuple[str, ...] = SUITES
    seed: int = 42
    workers: int = 1
    kind: str = "profile"
    log_level: str = "INFO"

    @property
    def params(self) -> ProblemParams:
        return validate_params(self.N, self.p, self.b, self.M)

    @property
    def grid(self) -> RadialGrid:
        return build_grid(self.N, self.rmax, self.nodes, self.grading)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command, "N": self.N, "p": self.p, "b": self.b, "M": self.M,
            "M_list": list(self.M_list), "potential": self.potential.label(),
            "rmax": self.rmax, "nodes": self.nodes, "grading": self.grading,
            "flow": self.flow.as_dict(), "method": self.method, "out_dir": self.out_dir,
            "format": self.format, "suites": list(self.suites), "seed": self.seed, "workers": self.workers,
            "kind": self.kind, "log_level": self.log_level,
        }


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; every option defaults to None so that only flags given on the command line override."""
    parser = argparse.ArgumentParser(prog="gpsing",
                                     description="Trapped GP minimizers with the singular nonlinearity |x|^{-b}.")
    parser.add_argument("command", choices=COMMANDS, help="What to run.")
    parser.add_argument("--N", type=int, help="Spatial dimension.")
    parser.add_argument("--p", type=float, help="Nonlinearity power.")
    parser.add_argument("--b", type=float, help="Singularity exponent of |x|^{-b}.")
    parser.add_argument("--M", type=float, help="Interaction strength (minimize).")
    parser.add_argument("--M-list", dest="M_list", type=str, help="Comma-separated sweep values, e.g. 10,100,1e3.")
    parser.add_argument("--potential", type=str, help="zero or power:gamma,s (default power:1,2).")
    parser.add_argument("--rmax", type=float, help="Reference grid radius.")
    parser.add_argument("--nodes", type=int, help="Reference grid nodes.")
    parser.add_argument("--grading", type=float, help="Grid grading exponent.")
    parser.add_argument("--dt", type=float, help="Initial pseudo-time step.")
    parser.add_argument("--max-iters", dest="max_iters", type=int, help="Flow iteration cap.")
    parser.add_argument("--tol-energy", dest="tol_energy", type=float, help="Relative energy-decrease tolerance.")
    parser.add_argument("--tol-residual", dest="tol_residual", type=float, help="Euler-Lagrange residual tolerance.")
    parser.add_argument("--scheme", choices=("semi_implicit", "explicit"), help="Flow step.")
    parser.add_argument("--method", choices=METHODS, help="Route to the ground state w.")
    parser.add_argument("--out", dest="out_dir", type=str, help=f"Output directory (default ${OUT_DIR_ENV}).")
    parser.add_argument("--format", choices=FORMATS, help="Report format.")
    parser.add_argument("--config", type=str, help="JSON file with defaults for any of the above.")
    parser.add_argument("--suite", dest="suites", action="append", help="Verification suite (repeatable).")
    parser.add_argument("--seed", type=int, help="Seed of the randomized GN suite.")
    parser.add_argument("--workers", type=int, help="Sweep worker processes.")
    parser.add_argument("--kind", choices=PLOT_KINDS, help="Plot-data series (plotdata).")
    parser.add_argument("--log-level", dest="log_level", type=str, help="Logging level (default INFO).")
    return parser


def _load_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise IOFailure(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"--config {path} must hold a JSON object")
    # A nested "flow" block is flattened onto the flow keys
    flow = data.pop("flow", {}) or {}
    for key in FLOW_KEYS:
        if key in flow and key not in data:
            data[key] = flow[key]
    return data


def _parse_M_list(value) -> Tuple[float, ...]:
    if isinstance(value, str):
        try:
            value = [float(part) for part in value.split(",") if part.strip()]
        except ValueError as exc:
            raise UsageError(f"--M-list expects comma-separated numbers, got {value!r}") from exc
    return tuple(float(M) for M in value)


def _parse_suites(value) -> Tuple[str, ...]:
    if value is None:
        return SUITES
    if isinstance(value, str):
        value = [value]
    names: List[str] = []
    for item in value:
        names.extend(part.strip() for part in str(item).split(",") if part.strip())
    if "all" in names:
        return SUITES
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise UsageError(f"--suite: unknown suite(s) {unknown}; choose from {list(SUITES)}")
    return tuple(dict.fromkeys(names))


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Resolves a RunConfig: built-in defaults < JSON config file (--config) < command-line flags.

    Args:
        argv (Optional[Sequence[str]]): Command-line arguments (sys.argv[1:] when None).

    Returns:
        RunConfig: The resolved configuration; (N, p, b, M) are validated.

    Raises:
        UsageError: On malformed flags or config entries.
        RegimeViolation: If the parameters leave the subcritical regime.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise UsageError("invalid command line; see --help") from exc

    values: Dict[str, Any] = _load_config_file(args.config) if args.config else {}
    unknown = set(values) - set(RunConfig.__dataclass_fields__) - set(FLOW_KEYS)
    if unknown:
        raise UsageError(f"--config: unknown keys {sorted(unknown)}")
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            values[key] = value
    values.pop("command", None)

    flow_updates = {key: values.pop(key) for key in FLOW_KEYS if key in values}
    if "M_list" in values:
        values["M_list"] = _parse_M_list(values["M_list"])
    if "potential" in values and isinstance(values["potential"], str):
        values["potential"] = PotentialSpec.parse(values["potential"])
    values["suites"] = _parse_suites(values.get("suites"))
    if "out_dir" not in values:
        values["out_dir"] = os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR
    for key, allowed in (("method", METHODS), ("format", FORMATS), ("kind", PLOT_KINDS)):
        if key in values and values[key] not in allowed:
            raise UsageError(f"--{key} must be one of {list(allowed)}, got {values[key]!r}")

    try:
        flow = replace(FlowConfig(), **flow_updates)
        config = RunConfig(command=args.command, flow=flow, **values)
    except TypeError as exc:
        raise UsageError(f"invalid configuration: {exc}") from exc

    if config.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {config.workers}")
    # Fail on the regime before any solver starts
    for M in (config.M, *config.M_list):
        validate_params(config.N, config.p, config.b, M)
    if any(b <= a for a, b in zip(config.M_list, config.M_list[1:])):
        raise UsageError(f"--M-list must be strictly increasing, got {list(config.M_list)}")
    return config
