# gpsing/cli.py

import json
import logging
import os
import sys
from typing import Optional, Sequence

from gpsing.algorithms.minimization.gradient_flow import gfdn_minimize
from gpsing.algorithms.profile.ground_state import GroundStateW
from gpsing.common.errors import GpSingError, IOFailure, MaxItersReached, RegimeViolation, SolverError
from gpsing.common.problem import epsilon_of
from gpsing.experiments.verification import VerificationContext, verify_suites
from gpsing.utils.config import RunConfig, parse_config
from gpsing.utils.general import set_filepath
from gpsing.utils.io import emit_plot_data, save_minimizer, save_profile, save_report, write_json

logger = logging.getLogger("gpsing")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REGIME = 2
EXIT_SOLVER = 3
EXIT_VERIFICATION = 4


def compute_profile(config: RunConfig) -> GroundStateW:
    """w by config.method on the reference grid."""
    return VerificationContext(config).profile


def run_wprofile(config: RunConfig) -> int:
    profile = compute_profile(config)
    path = save_profile(profile, config.out_dir, config.format, config.as_dict())
    print(json.dumps({"path": path, **profile.header()}))
    return EXIT_OK


def run_minimize(config: RunConfig) -> int:
    profile = compute_profile(config)
    params = config.params
    eps = epsilon_of(params, profile.a_star)
    grid = config.grid.scaled(min(1.0, eps))
    status = EXIT_OK
    try:
        result = gfdn_minimize(params, config.potential, grid, config.flow, profile=profile)
    except MaxItersReached as exc:
        result, status = exc.result, EXIT_SOLVER
    path = save_minimizer(result, config.out_dir, config.format, config.as_dict())
    print(json.dumps({"path": path, **result.summary()}))
    return status


def run_sweep_command(config: RunConfig) -> int:
    report = VerificationContext(config).sweep
    path = save_report(report, config.out_dir, config.format, config.as_dict())
    print(report.to_frame().to_string(index=False))
    print(f"Report written to {path}")
    return EXIT_OK if len(report.converged_rows) == len(report.rows) else EXIT_SOLVER


def run_verify(config: RunConfig) -> int:
    _, report = verify_suites(config)
    path = write_json(report, os.path.join(config.out_dir, "verify_report.json"))
    for name, suite in report["suites"].items():
        print(f"{name:<14} {'pass' if suite['passed'] else 'FAIL'}")
    print(f"Verification report written to {path}")
    return EXIT_OK if report["passed"] else EXIT_VERIFICATION


def run_plotdata(config: RunConfig) -> int:
    context = VerificationContext(config)
    profile, report = context.profile, context.sweep
    path = emit_plot_data(report, config.kind, config.out_dir, profile=profile, config=config.as_dict())
    print(f"Plot data written to {path}")
    return EXIT_OK


COMMANDS = {
    "wprofile": run_wprofile,
    "minimize": run_minimize,
    "sweep": run_sweep_command,
    "verify": run_verify,
    "plotdata": run_plotdata,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point. Exit codes: 0 success, 1 usage, 2 regime violation, 3 solver failure, 4 verification failure.
    """
    try:
        config = parse_config(argv)
    except RegimeViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (GpSingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=config.log_level.upper(),
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    try:
        write_json(config.as_dict(), set_filepath(os.path.join(config.out_dir, "resolved_config.json")))
        return COMMANDS[config.command](config)
    except RegimeViolation as exc:
        logger.error("%s", exc)
        return EXIT_REGIME
    except SolverError as exc:
        logger.error("solver failure: %s", exc)
        return EXIT_SOLVER
    except (IOFailure, GpSingError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
