import logging
from dataclasses import replace
from typing import Optional

import numpy as np

from gpsing.algorithms.minimization.gradient_flow import FlowConfig, gfdn_minimize
from gpsing.algorithms.profile.ground_state import GroundStateW, summarize_profile
from gpsing.algorithms.profile.shooting import solve_w_shooting
from gpsing.common.errors import NonpositiveAStar
from gpsing.common.problem import PotentialSpec, ProblemParams, a_star_from_multiplier
from gpsing.common.radial_grid import (
    RadialField,
    RadialGrid,
    build_grid,
    check_boundary,
    l2_norm_sq,
    rescale,
    sup_distance,
)

logger = logging.getLogger(__name__)

# Agreement required between the two routes to w.
CROSS_CHECK_TOL = 1e-3


def _profile_flow_config(flow_config: Optional[FlowConfig]) -> FlowConfig:
    if flow_config is None:
        return FlowConfig(tol_energy=1e-12, tol_residual=1e-9, init="gaussian")
    return flow_config


def solve_w_flow(params: ProblemParams, grid: RadialGrid, flow_config: Optional[FlowConfig] = None,
                 verbose: bool = False) -> GroundStateW:
    """
    Computes w from the trap-free minimizer u~_1 of I~(1).

    u~_1 solves -Delta u - u^p |x|^{-b} = mu~_1 u with mu~_1 < 0, so with kappa = sqrt(-mu~_1) and
    A = kappa^{(2-b)/(p-1)} the profile is w(y) = u~_1(y / kappa) / A. A coarse pass on a wide grid estimates
    kappa; the fine pass runs on the reference node pattern stretched by 1 / kappa, so the recovered w is sampled
    with the reference resolution.

    Args:
        params (ProblemParams): (N, p, b); M is ignored.
        grid (RadialGrid): Reference grid w is returned on.
        flow_config (Optional[FlowConfig]): Tolerances and scheme of the fine pass.
        verbose (bool): Print flow progress.

    Returns:
        GroundStateW: The profile, method "flow".
    """
    params_1 = params.with_M(1.0)
    trap_free = PotentialSpec.zero()
    fine_config = _profile_flow_config(flow_config)

    coarse_grid = build_grid(params.N, 2 * grid.rmax, max(401, grid.nodes // 4), grid.grading)
    coarse_config = replace(fine_config, init="gaussian", init_width=2.0, init_profile=None,
                            tol_energy=max(fine_config.tol_energy, 1e-9),
                            tol_residual=max(fine_config.tol_residual, 1e-5))
    coarse = gfdn_minimize(params_1, trap_free, coarse_grid, coarse_config, verbose=verbose)
    if not coarse.mu < 0:
        raise NonpositiveAStar(f"trap-free multiplier must be negative, got {coarse.mu}")
    kappa_estimate = float(np.sqrt(-coarse.mu))

    fine_grid = build_grid(params.N, grid.rmax / kappa_estimate, grid.nodes, grid.grading)
    fine = gfdn_minimize(params_1, trap_free, fine_grid,
                         replace(fine_config, init="profile", init_profile=coarse.u), verbose=verbose)
    mu_1 = fine.mu
    if not mu_1 < 0:
        raise NonpositiveAStar(f"trap-free multiplier must be negative, got {mu_1}")

    kappa = float(np.sqrt(-mu_1))
    amplitude = kappa ** ((2 - params.b) / (params.p - 1))
    stretched = rescale(fine.u, 1.0 / kappa, grid)
    profile = RadialField(grid, stretched.values * kappa ** (params.N / 2) / amplitude)
    check_boundary(profile, name="w (flow)", relative=True)
    logger.info("flow route: mu~_1 = %.12g, kappa = %.10f, a* = %.12g", mu_1, kappa, l2_norm_sq(profile))

    return summarize_profile(profile, params_1, "flow", {
        "mu_tilde_1": mu_1,
        "kappa": kappa,
        "a_star_multiplier": a_star_from_multiplier(params_1, mu_1),
        "iters": coarse.iters + fine.iters,
        "el_residual": fine.el_residual,
    })


def cross_validate_w(params: ProblemParams, grid: RadialGrid, flow_config: Optional[FlowConfig] = None,
                     tol: float = CROSS_CHECK_TOL, **shooting_kwargs) -> GroundStateW:
    """
    Computes w by both routes and records their discrepancy.

    Returns:
        GroundStateW: The shooting profile, method "cross_validated", with diagnostics
        sup_dist_rel (sup distance over w(0)), a_star_rel (relative a_star difference) and agreed.
    """
    by_flow = solve_w_flow(params, grid, flow_config)
    by_shooting = solve_w_shooting(params.with_M(1.0), grid, **shooting_kwargs)

    sup_dist_rel = sup_distance(by_flow.profile, by_shooting.profile) / by_shooting.w0
    a_star_rel = abs(by_flow.a_star - by_shooting.a_star) / by_shooting.a_star
    agreed = sup_dist_rel <= tol and a_star_rel <= tol
    if not agreed:
        logger.warning("flow and shooting disagree: sup %.3e, a* %.3e (tolerance %g)", sup_dist_rel, a_star_rel, tol)

    diagnostics = dict(by_shooting.diagnostics)
    diagnostics.update({
        "sup_dist_rel": sup_dist_rel,
        "a_star_rel": a_star_rel,
        "a_star_flow": by_flow.a_star,
        "a_star_shooting": by_shooting.a_star,
        "agreed": agreed,
    })
    return replace(by_shooting, method="cross_validated", diagnostics=diagnostics)
