"""
Verification suites. Each suite measures one family of closed-form or limit statements and reports every
measured value next to its tolerance; the run passes iff every check passes.

    gn            sharp Gagliardo-Nirenberg inequality over seeded random fields, equality at w
    pohozaev      both Pohozaev identities for w
    scaling       trap-free energies against -lambda0 (M / a_star)^{beta_energy}
    concentration trapped sweep: energy limit, vanishing trap mass, profile convergence, sandwich, uniform bounds
    decay         exponential tails of w, of the last rescaled minimizer and of its gradient
    multiplier    trap-free multiplier closed form and eps^2 mu -> -1 along the sweep
    crossval      agreement of the flow and shooting routes to w
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from gpsing.algorithms.minimization.gradient_flow import gfdn_minimize
from gpsing.algorithms.minimization.test_function import cutoff_mass_bound, cutoff_normalization
from gpsing.algorithms.profile.flow_route import cross_validate_w, solve_w_flow
from gpsing.algorithms.profile.ground_state import POHOZAEV_TOL, GroundStateW, gn_ratio
from gpsing.algorithms.profile.shooting import solve_w_shooting
from gpsing.common.decay import decay_fit
from gpsing.common.errors import UsageError
from gpsing.common.problem import (
    PotentialSpec,
    derived_constants,
    epsilon_of,
    tilde_I_closed,
    tilde_multiplier_closed,
)
from gpsing.common.radial_grid import RadialField, h1_seminorm_sq, l2_norm_sq
from gpsing.experiments.asymptotics import (
    ScalingReport,
    limit_singular_mass,
    profile_convergence,
    uniform_bounds_check,
)
from gpsing.simulation.sweep import run_sweep
from gpsing.utils.general import __version__

logger = logging.getLogger(__name__)

RANDOM_FIELDS = 100
GN_SLACK = 1e-6
GN_EQUALITY_TOL = 1e-3
SCALING_TOL = 1e-3
SCALING_M = (1.0, 10.0, 100.0)
MULTIPLIER_TOL = 1e-3
LIMIT_TOL = 0.02
TRAP_MASS_TOL = 1e-2
SUP_DIST_FRACTION = 5e-2
CUTOFF_TAU = 15.0
CUTOFF_EXCESS_TOL = 1e-6
CROSS_CHECK_TOL = 1e-3


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        out = asdict(self)
        out["measured"] = float(self.measured) if np.isfinite(self.measured) else None
        out["passed"] = bool(self.passed)
        return out


@dataclass
class SuiteResult:
    name: str
    checks: List[Check] = field(default_factory=list)

    def at_most(self, name: str, measured: float, tolerance: float) -> None:
        self.checks.append(Check(name, float(measured), tolerance, bool(measured <= tolerance)))

    def at_least(self, name: str, measured: float, bound: float) -> None:
        self.checks.append(Check(name, float(measured), bound, bool(measured >= bound)))

    def holds(self, name: str, condition: bool) -> None:
        self.checks.append(Check(name, float(bool(condition)), 1.0, bool(condition)))

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checks": [check.as_dict() for check in self.checks]}


class VerificationContext:
    """Lazily computed, shared artifacts of a verification run: the profile w and the trapped sweep."""

    def __init__(self, config) -> None:
        self.config = config
        self.params = config.params
        self.grid = config.grid
        self._profile: Optional[GroundStateW] = None
        self._sweep: Optional[ScalingReport] = None

    @property
    def profile(self) -> GroundStateW:
        if self._profile is None:
            params, grid = self.params.with_M(1.0), self.grid
            if self.config.method == "shooting":
                self._profile = solve_w_shooting(params, grid)
            elif self.config.method == "cross":
                self._profile = cross_validate_w(params, grid)
            else:
                self._profile = solve_w_flow(params, grid)
        return self._profile

    @property
    def sweep(self) -> ScalingReport:
        if self._sweep is None:
            self._sweep = run_sweep(self.profile, self.config.potential, self.config.M_list, self.grid,
                                    self.config.flow, workers=self.config.workers)
        return self._sweep


def random_fields(grid, seed: int, count: int = RANDOM_FIELDS) -> List[RadialField]:
    """Sums of three centred Gaussians with positive coefficients and widths in [0.3, 3]."""
    rng = np.random.default_rng(seed)
    fields = []
    for _ in range(count):
        weights = rng.uniform(0.1, 1.0, size=3)
        widths = rng.uniform(0.3, 3.0, size=3)
        values = np.sum(weights[:, None] * np.exp(-(grid.r[None, :] / widths[:, None]) ** 2), axis=0)
        fields.append(RadialField(grid, values))
    return fields


def suite_gn(context: VerificationContext) -> SuiteResult:
    result = SuiteResult("gn")
    profile = context.profile
    c_gn = profile.constants.c_gn
    ratios = [gn_ratio(u, profile.params, c_gn) for u in random_fields(context.grid, context.config.seed)]
    result.at_most("max_random_ratio", max(ratios), 1 + GN_SLACK)
    result.at_most("w_ratio_error", abs(gn_ratio(profile.profile, profile.params, c_gn) - 1), GN_EQUALITY_TOL)
    return result


def suite_pohozaev(context: VerificationContext) -> SuiteResult:
    result = SuiteResult("pohozaev")
    profile = context.profile
    res1, res2 = profile.pohozaev_res
    result.at_most("residual_interaction", res1, POHOZAEV_TOL)
    result.at_most("residual_mass", res2, POHOZAEV_TOL)
    kinetic_ratio = h1_seminorm_sq(profile.profile) / l2_norm_sq(profile.profile)
    expected = profile.constants.kinetic_ratio
    result.at_most("kinetic_ratio_error", abs(kinetic_ratio - expected) / expected, POHOZAEV_TOL)
    return result


def suite_scaling(context: VerificationContext) -> SuiteResult:
    result = SuiteResult("scaling")
    profile = context.profile
    trap_free = PotentialSpec.zero()
    for M in SCALING_M:
        params = profile.params.with_M(M)
        eps = epsilon_of(params, profile.a_star)
        minimizer = gfdn_minimize(params, trap_free, context.grid.scaled(eps), context.config.flow, profile=profile)
        closed = tilde_I_closed(params, profile.a_star)
        result.at_most(f"energy_error_M{M:g}", abs(minimizer.energy_total - closed) / abs(closed), SCALING_TOL)
    return result


def suite_multiplier(context: VerificationContext) -> SuiteResult:
    result = SuiteResult("multiplier")
    profile = context.profile
    params = profile.params.with_M(1.0)
    eps = epsilon_of(params, profile.a_star)
    minimizer = gfdn_minimize(params, PotentialSpec.zero(), context.grid.scaled(eps), context.config.flow,
                              profile=profile)
    closed = tilde_multiplier_closed(params, profile.a_star)
    result.at_most("tilde_mu_1_error", abs(minimizer.mu - closed) / abs(closed), MULTIPLIER_TOL)

    rows = context.sweep.converged_rows
    if not rows:
        result.holds("sweep_converged", False)
        return result
    errors = [abs(row.mu_eps2 + 1) for row in rows]
    result.at_most("final_multiplier_error", errors[-1], LIMIT_TOL)
    result.holds("multiplier_error_decreasing", bool(np.all(np.diff(errors) < 0)))
    result.holds("multipliers_negative", all(row.mu < 0 for row in rows))
    return result


def suite_concentration(context: VerificationContext) -> SuiteResult:
    result = SuiteResult("concentration")
    profile = context.profile
    report = context.sweep
    rows = report.converged_rows
    result.holds("all_rows_converged", len(rows) == len(report.rows))
    if len(rows) < 2:
        return result

    lambda0 = derived_constants(profile.params).lambda0
    trends = report.trends()
    ratio_errors = [abs(row.ratio + lambda0) / lambda0 for row in rows]
    result.at_most("final_ratio_error", ratio_errors[-1], LIMIT_TOL)
    trap_free = context.config.potential.is_zero
    if trap_free:
        # I(M) = I~(M) exactly; only round-off is left, so no monotone trends
        result.at_most("max_ratio_error", max(ratio_errors), SCALING_TOL)
        result.at_most("max_trap_mass", max(row.trap_mass for row in rows), 1e-12)
    else:
        result.holds("ratio_error_decreasing", trends["ratio_error_decreasing"])
        result.at_most("final_trap_mass", rows[-1].trap_mass, TRAP_MASS_TOL)
        result.holds("trap_mass_decreasing", trends["trap_mass_decreasing"])

    convergence = profile_convergence(report, profile)
    result.at_most("final_sup_dist_relative", convergence.final_sup_relative, SUP_DIST_FRACTION)
    if not trap_free:
        result.holds("sup_dist_decreasing", convergence.sup_decreasing)
        result.holds("h1_dist_decreasing", convergence.h1_decreasing)
    result.holds("sandwich_all_rows", all(row.sandwich for row in rows))
    result.holds("trap_mass_below_energy_gap",
                 all(row.trap_mass <= row.energy_gap + 1e-8 * max(abs(row.I_M), 1.0) for row in rows))

    bounds = uniform_bounds_check(report, profile)
    result.holds("uniform_bounds", bounds["bounded"])
    if trap_free:
        result.at_most("max_gradient_error", max(bounds["gradient_error"]), SCALING_TOL)
    result.at_most("final_pohozaev_ratio_error", bounds["final_ratio_error"], LIMIT_TOL)
    limit = limit_singular_mass(profile)
    result.at_most("final_sing_mass_error", abs(rows[-1].sing_mass - limit) / limit, LIMIT_TOL)

    a_tau_sq = cutoff_normalization(profile, CUTOFF_TAU) ** 2
    result.at_least("cutoff_normalization_sq", a_tau_sq, 1.0 - 1e-12)
    result.at_most("cutoff_normalization_excess", a_tau_sq - 1.0, CUTOFF_EXCESS_TOL)
    result.at_most("cutoff_bound_margin", a_tau_sq - cutoff_mass_bound(profile, CUTOFF_TAU), 1e-12)
    return result


def suite_decay(context: VerificationContext) -> SuiteResult:
    result = SuiteResult("decay")
    fit = decay_fit(context.profile.profile)
    result.at_most("w_rate_error", abs(fit.rate - 1.0), 0.1)
    result.at_least("w_fit_quality", fit.quality, 0.99)
    rows = context.sweep.converged_rows
    if not rows or not np.isfinite(rows[-1].decay_rate):
        result.holds("final_row_decay_available", False)
        return result
    result.at_least("final_row_rate", rows[-1].decay_rate, 0.5)
    result.at_least("final_row_fit_quality", rows[-1].decay_quality, 0.99)
    # |grad w_k| decays exponentially as well
    result.at_least("final_row_gradient_rate", rows[-1].grad_decay_rate, 0.5)
    result.at_least("final_row_gradient_fit_quality", rows[-1].grad_decay_quality, 0.99)
    return result


def suite_crossval(context: VerificationContext) -> SuiteResult:
    result = SuiteResult("crossval")
    profile = cross_validate_w(context.params.with_M(1.0), context.grid, tol=CROSS_CHECK_TOL)
    result.at_most("a_star_relative", profile.diagnostics["a_star_rel"], CROSS_CHECK_TOL)
    result.at_most("sup_dist_over_w0", profile.diagnostics["sup_dist_rel"], CROSS_CHECK_TOL)
    return result


SUITE_RUNNERS: Dict[str, Callable[[VerificationContext], SuiteResult]] = {
    "gn": suite_gn,
    "pohozaev": suite_pohozaev,
    "scaling": suite_scaling,
    "concentration": suite_concentration,
    "decay": suite_decay,
    "multiplier": suite_multiplier,
    "crossval": suite_crossval,
}


def verify_suites(config) -> Tuple[int, dict]:
    """
    Runs the configured suites.

    Args:
        config (RunConfig): Resolved configuration; config.suites names the suites.

    Returns:
        Tuple[int, dict]: Exit status (0 iff every check passed, 4 otherwise) and the machine-readable report.

    Raises:
        UsageError: If a suite name is unknown.
    """
    unknown = [name for name in config.suites if name not in SUITE_RUNNERS]
    if unknown:
        raise UsageError(f"unknown verification suite(s): {unknown}; choose from {sorted(SUITE_RUNNERS)}")

    context = VerificationContext(config)
    suites = {}
    for name in config.suites:
        logger.info("verifying suite %s", name)
        outcome = SUITE_RUNNERS[name](context)
        suites[name] = outcome.as_dict()
        logger.info("suite %s: %s", name, "pass" if outcome.passed else "FAIL")

    passed = all(suite["passed"] for suite in suites.values())
    report = {
        "passed": passed,
        "suites": suites,
        "seed": config.seed,
        "version": __version__,
        "config": config.as_dict(),
    }
    return (0 if passed else 4), report
