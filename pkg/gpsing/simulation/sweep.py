import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

import numpy as np
from tqdm import tqdm

from gpsing.algorithms.minimization.gradient_flow import FlowConfig, MinimizerResult, gfdn_minimize, lagrange_multiplier
from gpsing.algorithms.minimization.test_function import test_function_energy
from gpsing.algorithms.profile.ground_state import GroundStateW, singular_integral
from gpsing.common.decay import decay_fit
from gpsing.common.errors import MaxItersReached, NonpositiveTail, SolverError, UsageError
from gpsing.common.problem import PotentialSpec, derived_constants, epsilon_of, tilde_I_closed
from gpsing.common.radial_grid import RadialGrid, h1_distance, h1_seminorm_sq, rescale, sup_distance
from gpsing.experiments.asymptotics import ScalingReport, ScalingRow

logger = logging.getLogger(__name__)

DEFAULT_M_LIST = (10.0, 100.0, 1e3, 1e4)
# Slack allowed in the discrete sandwich and trap-mass inequalities, relative to max(|I|, 1).
SANDWICH_SLACK = 1e-8


class SweepTrial:
    """
    Runs one trapped solve per interaction strength and assembles the ScalingReport.

    Each row solves on the reference node pattern scaled by min(1, eps(M)), so that the blow-up
    w_k(y) = eps^{N/2} u_M(eps y) lands exactly on the reference grid of w. The trap-free lower bound
    I~_h(M) = (M / a_star)^{beta_energy} I~_h(a_star) is the discrete minimum on the same scaled grid; it is
    computed once at M = a_star, where the minimizer is w / sqrt(a_star).

    Args:
        profile (GroundStateW): w on the reference grid.
        potential (PotentialSpec): The trap.
        M_list (Sequence[float]): Increasing interaction strengths.
        grid (Optional[RadialGrid]): Reference grid; defaults to the grid of w.
        flow_config (Optional[FlowConfig]): Flow configuration for every row.
        workers (int): Worker processes; rows are independent and reported in M order.
    """
    def __init__(self, profile: GroundStateW, potential: PotentialSpec, M_list: Sequence[float] = DEFAULT_M_LIST,
                 grid: Optional[RadialGrid] = None, flow_config: Optional[FlowConfig] = None, workers: int = 1) -> None:
        M_list = [float(M) for M in M_list]
        if not M_list or any(M <= 0 for M in M_list) or np.any(np.diff(M_list) <= 0):
            raise UsageError(f"M_list must be positive and strictly increasing, got {M_list}")
        if workers < 1:
            raise UsageError(f"workers must be >= 1, got {workers}")
        self.profile = profile
        self.params = profile.params
        self.potential = potential
        self.M_list = M_list
        self.grid = grid if grid is not None else profile.profile.grid
        self.flow_config = flow_config if flow_config is not None else FlowConfig()
        self.workers = workers
        self.trap_free_reference = None
        self.rows = []

    def _trap_free_reference(self) -> float:
        """Discrete trap-free minimum I~_h(a_star) on the reference grid."""
        if self.trap_free_reference is None:
            params = self.params.with_M(self.profile.a_star)
            result = _solve(params, PotentialSpec.zero(), self.grid, self.flow_config, self.profile)
            self.trap_free_reference = result.energy_total
            logger.info("trap-free reference I~_h(a*) = %.12g (closed form %.12g)", result.energy_total,
                        -derived_constants(params).lambda0)
        return self.trap_free_reference

    def run(self, verbose: bool = True) -> ScalingReport:
        reference = self._trap_free_reference()
        jobs = [(self.profile, self.potential, M, self.grid, self.flow_config, reference) for M in self.M_list]

        rows = {}
        with tqdm(total=len(jobs), desc="M sweep", disable=not verbose) as progress:
            if self.workers == 1:
                for job in jobs:
                    row = solve_row(*job)
                    rows[row.M] = row
                    progress.update(1)
            else:
                with ProcessPoolExecutor(max_workers=self.workers) as pool:
                    for row in pool.map(_solve_row_job, jobs):
                        rows[row.M] = row
                        progress.update(1)

        self.rows = [rows[M] for M in self.M_list]
        failed = [row.M for row in self.rows if not row.converged]
        if failed:
            logger.warning("sweep rows not converged: %s", failed)
        return ScalingReport(params=self.params, a_star=self.profile.a_star, potential=self.potential.label(),
                             rows=self.rows, metadata={"tilde_I_h_reference": reference})


def _solve(params, potential, grid, flow_config, profile) -> MinimizerResult:
    try:
        return gfdn_minimize(params, potential, grid, flow_config, profile=profile)
    except MaxItersReached as exc:
        return exc.result


def _solve_row_job(job) -> ScalingRow:
    return solve_row(*job)


def _tail_fit(w_k, M: float, gradient_tail: bool = False):
    """(rate, quality) of the exponential tail of w_k or of |w_k'|; NaN when the tail is not positive."""
    try:
        fit = decay_fit(w_k, gradient_tail=gradient_tail)
    except NonpositiveTail as exc:
        logger.debug("row M=%g: %s", M, exc)
        return math.nan, math.nan
    return fit.rate, fit.quality


def solve_row(profile: GroundStateW, potential: PotentialSpec, M: float, grid: RadialGrid,
              flow_config: FlowConfig, trap_free_reference: float) -> ScalingRow:
    """
    Solves the trapped problem at M and measures every ScalingRow field. Solver failures produce a failed row.
    """
    params = profile.params.with_M(M)
    a_star = profile.a_star
    constants = derived_constants(params)
    eps = epsilon_of(params, a_star)
    scaled_exactly = eps < 1
    solve_grid = grid.scaled(eps) if scaled_exactly else grid

    try:
        result = _solve(params, potential, solve_grid, flow_config, profile)
    except SolverError as exc:
        logger.warning("row M=%g failed: %s", M, exc)
        return ScalingRow.failed(M, eps, f"{type(exc).__name__}: {exc}")

    mu = lagrange_multiplier(result, params)
    I_M = result.energy_total
    energy_scale = (M / a_star) ** constants.beta_energy

    # Blow-up of u_M onto the reference grid
    w_k = rescale(result.u, eps, grid)
    target = profile.normalized_profile

    decay_rate, decay_quality = _tail_fit(w_k, M)
    grad_decay_rate, grad_decay_quality = _tail_fit(w_k, M, gradient_tail=True)

    if scaled_exactly:
        tilde_I_discrete = energy_scale * trap_free_reference
    else:
        tilde_I_discrete = _solve(params, PotentialSpec.zero(), solve_grid, flow_config, profile).energy_total
    upper_bound = test_function_energy(params, potential, solve_grid, profile=profile)
    slack = SANDWICH_SLACK * max(abs(I_M), 1.0)
    sandwich = tilde_I_discrete - slack <= I_M <= upper_bound + slack

    row = ScalingRow(
        M=M,
        I_M=I_M,
        ratio=I_M / energy_scale,
        trap_mass=result.energy_parts.trap,
        eps=eps,
        mu_eps2=eps ** 2 * mu,
        sup_dist=sup_distance(w_k, target),
        h1_dist=h1_distance(w_k, target),
        sing_mass=singular_integral(w_k, params),
        decay_rate=decay_rate,
        converged=result.converged,
        mu=mu,
        tilde_I=tilde_I_closed(params, a_star),
        tilde_I_discrete=tilde_I_discrete,
        energy_gap=I_M - tilde_I_discrete,
        upper_bound=upper_bound,
        sandwich=bool(sandwich),
        grad_sq=h1_seminorm_sq(w_k),
        decay_quality=decay_quality,
        grad_decay_rate=grad_decay_rate,
        grad_decay_quality=grad_decay_quality,
        iters=result.iters,
        el_residual=result.el_residual,
        w_k=w_k,
    )
    logger.info("M=%g: I=%.10g ratio=%.8f trap=%.3e eps^2 mu=%.8f sup=%.3e", M, I_M, row.ratio, row.trap_mass,
                row.mu_eps2, row.sup_dist)
    return row


def run_sweep(profile: GroundStateW, potential: PotentialSpec, M_list: Sequence[float] = DEFAULT_M_LIST,
              grid: Optional[RadialGrid] = None, flow_config: Optional[FlowConfig] = None, workers: int = 1,
              verbose: bool = False) -> ScalingReport:
    """
    Sweeps M upwards and reports the approach of the trapped minimizers to the blow-up profile.

    Args:
        profile (GroundStateW): w.
        potential (PotentialSpec): The trap.
        M_list (Sequence[float]): Increasing interaction strengths.
        grid (Optional[RadialGrid]): Reference grid; defaults to the grid of w.
        flow_config (Optional[FlowConfig]): Flow configuration (scaled_w initial state by default).
        workers (int): Worker processes.
        verbose (bool): Show a progress bar.

    Returns:
        ScalingReport: One row per M, in M order; failed rows are kept.
    """
    return SweepTrial(profile, potential, M_list, grid, flow_config, workers).run(verbose=verbose)
