import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from gpsing.algorithms.common.base_solver import BaseSolver
from gpsing.algorithms.minimization.energy import DiscreteEnergy, EnergyParts
from gpsing.algorithms.minimization.test_function import tilde_u_profile
from gpsing.common.errors import FlowDiverged, GridTooCoarse, MaxItersReached, UsageError, ZeroField
from gpsing.common.flow_logger import FlowLogger
from gpsing.common.problem import PotentialSpec, ProblemParams
from gpsing.common.radial_grid import RadialField, RadialGrid, rescale

logger = logging.getLogger(__name__)

INITS = ("gaussian", "profile", "scaled_w")
SCHEMES = ("semi_implicit", "explicit")

# Energy may rise by this much (relative to max(|E|, 1)) on an accepted step.
DESCENT_SLACK = 1e-12
# Minimum number of nodes above half the peak for a resolved minimizer.
MIN_CORE_NODES = 8
# Give up once the shift (or 1 / dt) has grown by this factor without an accepted step.
MAX_SHIFT_GROWTH = 1e12


@dataclass(frozen=True)
class FlowConfig:
    """
    Configuration of the normalized gradient flow.

    Attributes:
        dt: Initial pseudo-time step. None selects the scheme default: 1 / (1 + 2|mu_init|) for the
            semi-implicit scheme and 0.1 h_min^2 for the explicit one. The step never grows beyond it.
        max_iters: Iteration cap (accepted plus rejected trial steps).
        tol_energy: Relative energy-decrease threshold.
        tol_residual: Euler-Lagrange residual threshold.
        init: "gaussian", "profile" or "scaled_w".
        init_width: Width of the Gaussian initial state exp(-r^2 / (2 width^2)).
        init_profile: Initial field for init="profile"; rescaled onto the solve grid if needed.
        scheme: "semi_implicit" or "explicit".
    """
    dt: Optional[float] = None
    max_iters: int = 20000
    tol_energy: float = 1e-10
    tol_residual: float = 1e-6
    init: str = "scaled_w"
    init_width: float = 1.0
    init_profile: Optional[RadialField] = field(default=None, compare=False, repr=False)
    scheme: str = "semi_implicit"

    def __post_init__(self) -> None:
        if self.dt is not None and not self.dt > 0:
            raise UsageError(f"dt must be positive, got {self.dt}")
        if self.max_iters < 1:
            raise UsageError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (self.tol_energy > 0 and self.tol_residual > 0):
            raise UsageError("tolerances must be positive")
        if self.init not in INITS:
            raise UsageError(f"Unknown init: {self.init}")
        if self.scheme not in SCHEMES:
            raise UsageError(f"Unknown scheme: {self.scheme}")
        if not self.init_width > 0:
            raise UsageError(f"init_width must be positive, got {self.init_width}")
        if self.init == "profile" and self.init_profile is None:
            raise UsageError("init='profile' needs init_profile")

    def as_dict(self) -> dict:
        return {
            "dt": self.dt, "max_iters": self.max_iters, "tol_energy": self.tol_energy,
            "tol_residual": self.tol_residual, "init": self.init, "init_width": self.init_width,
            "scheme": self.scheme,
        }


@dataclass
class MinimizerResult:
    """
    A constrained minimizer u_M and its diagnostics.

    Attributes:
        u: The minimizer, ||u||_2^2 = 1 and u >= 0.
        energy_total: The I(M) estimate E_M(u).
        energy_parts: Kinetic, trap and interaction terms.
        mu: Lagrange multiplier from the energy identity.
        mu_rayleigh: Lagrange multiplier from the Rayleigh quotient.
        iters: Trial steps used.
        el_residual: Discrete Euler-Lagrange residual.
        converged: False when the iteration cap was reached.
        params: The problem.
        potential: The trap.
        flow_stats: FlowLogger statistics (energy history, step sizes, rejections).
        dt_final: Step size (1 / shift for the semi-implicit scheme) at exit.
    """
    u: RadialField
    energy_total: float
    energy_parts: EnergyParts
    mu: float
    mu_rayleigh: float
    iters: int
    el_residual: float
    converged: bool
    params: ProblemParams
    potential: PotentialSpec
    flow_stats: Dict[str, Any] = field(default_factory=dict, repr=False)
    dt_final: float = float("nan")

    def summary(self) -> dict:
        """JSON-ready summary without the field values."""
        return {
            "params": self.params.as_dict(),
            "potential": self.potential.label(),
            "energy_total": self.energy_total,
            "energy_parts": self.energy_parts.as_dict(),
            "mu": self.mu,
            "mu_rayleigh": self.mu_rayleigh,
            "iters": self.iters,
            "el_residual": self.el_residual,
            "converged": self.converged,
            "rejections": self.flow_stats.get("rejections", 0),
        }


class GradientFlow(BaseSolver):
    """
    Discrete normalized gradient flow for I(M) = inf { E_M(u) : ||u||_2^2 = 1 }.

    Each step descends along H(u) = -Delta u + V u - M^{(p-1)/2} |u|^{p-1} u |x|^{-b} and projects back onto the
    unit sphere. The semi-implicit scheme solves
        (K + C V - M^{(p-1)/2} C_b u_n^{p-1} + alpha C) u* = alpha C u_n
    on the interior nodes (tridiagonal, symmetric, nonnegative inverse once alpha exceeds -mu), then normalizes.
    The explicit scheme takes u* = u_n - dt H(u_n). A trial is rejected if it loses positivity, is not finite, or
    raises the energy by more than the descent slack; the step is then halved (shift doubled).

    Args:
        params (ProblemParams): The problem; params.M sets the coupling.
        potential (PotentialSpec): The trap.
        grid (RadialGrid): Solve grid (Dirichlet at rmax).
        config (Optional[FlowConfig]): Flow configuration.
        profile (Optional[GroundStateW]): w, needed by init="scaled_w".
        verbose (bool): Print progress every 100 accepted steps.
    """
    def __init__(
        self,
        params: ProblemParams,
        potential: PotentialSpec,
        grid: RadialGrid,
        config: Optional[FlowConfig] = None,
        profile=None,
        verbose: bool = False,
    ) -> None:
        super().__init__(params, grid, verbose)
        self.name = "Normalized Gradient Flow"
        self.potential = potential
        self.config = config if config is not None else FlowConfig()
        self.profile = profile
        self.energy = DiscreteEnergy(grid, params, potential)
        self.flow_logger = FlowLogger()

        self.reset()

    def reset(self) -> None:
        self.flow_logger.reset()

    def initial_state(self) -> np.ndarray:
        """Initial field on the solve grid, before normalization."""
        config = self.config
        r = self.grid.r
        if config.init == "scaled_w":
            if self.profile is not None:
                return tilde_u_profile(self.profile, self.params, self.grid).values
            logger.warning("init='scaled_w' without a profile; falling back to a Gaussian of width %g",
                           config.init_width)
        elif config.init == "profile":
            init = config.init_profile
            if init.grid != self.grid:
                init = rescale(init, 1.0, self.grid)
            return np.abs(init.values)
        return np.exp(-0.5 * (r / config.init_width) ** 2)

    def _check_resolution(self, values: np.ndarray, when: str) -> None:
        core = int(np.sum(values > 0.5 * np.max(values)))
        if core < MIN_CORE_NODES:
            raise GridTooCoarse(f"only {core} nodes above half maximum {when}; refine the grid near the origin")

    def _semi_implicit_trial(self, values: np.ndarray, shift: float) -> Optional[np.ndarray]:
        energy = self.energy
        interior = slice(0, self.grid.nodes - 1)
        banded = energy.banded(energy.trap_mass[interior] - energy.nonlinear_weight(values)[interior]
                               + shift * energy.mass[interior])
        rhs = shift * energy.mass[interior] * values[interior]
        try:
            solved = solve_banded((1, 1), banded, rhs, check_finite=False)
        except (LinAlgError, ValueError):
            return None
        trial = np.zeros_like(values)
        trial[interior] = solved
        return trial

    def _explicit_trial(self, values: np.ndarray, dt: float) -> np.ndarray:
        trial = values - dt * self.energy.hamiltonian(values)
        trial[-1] = 0.0
        return trial

    def _accept(self, trial: Optional[np.ndarray], energy_now: float):
        """Normalized trial and its energy, or None when the trial is rejected."""
        if trial is None or not np.all(np.isfinite(trial)) or np.any(trial < 0) or not np.any(trial > 0):
            return None
        trial = self.energy.normalize(trial)
        energy_new = self.energy.total(trial)
        if not np.isfinite(energy_new):
            return None
        if energy_new - energy_now > DESCENT_SLACK * max(abs(energy_now), 1.0):
            return None
        return trial, energy_new

    def _result(self, values: np.ndarray, iters: int, converged: bool, step: float) -> MinimizerResult:
        parts = self.energy.parts(values)
        mu_rayleigh, residual = self.energy.residual(values)
        mu = parts.total - (self.params.p - 1) / (self.params.p + 1) * self.energy.coupling * parts.interaction
        return MinimizerResult(
            u=RadialField(self.grid, values),
            energy_total=parts.total,
            energy_parts=parts,
            mu=float(mu),
            mu_rayleigh=float(mu_rayleigh),
            iters=iters,
            el_residual=residual,
            converged=converged,
            params=self.params,
            potential=self.potential,
            flow_stats=self.flow_logger.get_stats(),
            dt_final=step,
        )

    def solve(self) -> MinimizerResult:
        """
        Runs the flow until both the relative energy decrease and the EL residual fall below tolerance.

        Returns:
            MinimizerResult: The converged minimizer.

        Raises:
            GridTooCoarse: If the initial or final state is resolved by fewer than 8 nodes.
            FlowDiverged: If no step is accepted even after the step size collapsed.
            MaxItersReached: With the unconverged result attached.
        """
        self.reset()
        config = self.config
        values = np.abs(self.initial_state()).astype(float)
        values[-1] = 0.0
        if not np.any(values > 0):
            raise ZeroField("initial state vanishes on the solve grid")
        self._check_resolution(values, "in the initial state")
        values = self.energy.normalize(values)
        energy_now = self.energy.total(values)
        mu, residual = self.energy.residual(values)

        semi_implicit = config.scheme == "semi_implicit"
        if config.dt is not None:
            dt0 = config.dt
        elif semi_implicit:
            dt0 = 1.0 / (1.0 + 2.0 * abs(mu))
        else:
            dt0 = 0.1 * self.grid.h_min ** 2
        dt = dt0

        for iteration in range(1, config.max_iters + 1):
            if semi_implicit:
                trial = self._semi_implicit_trial(values, 1.0 / dt)
            else:
                trial = self._explicit_trial(values, dt)

            accepted = self._accept(trial, energy_now)
            if accepted is None:
                self.flow_logger.log_rejection()
                dt /= 2
                if dt < dt0 / MAX_SHIFT_GROWTH:
                    raise FlowDiverged(f"no descent step accepted down to dt = {dt:.3e} (iteration {iteration})")
                continue

            values, energy_new = accepted
            drop = (energy_now - energy_new) / max(abs(energy_new), 1.0)
            energy_now = energy_new
            mu, residual = self.energy.residual(values)
            self.flow_logger.log_iteration(energy_now, dt, residual)
            dt = min(dt * 1.1, dt0)

            if self.verbose and self.flow_logger.iterations % 100 == 0:
                print(f"Iteration {iteration}: E = {energy_now:.12f}, residual = {residual:.3e}, dt = {dt:.3e}")
            logger.debug("iteration %d: E=%.15g drop=%.3e residual=%.3e dt=%.3e",
                         iteration, energy_now, drop, residual, dt)

            if drop < config.tol_energy and residual < config.tol_residual:
                self._check_resolution(values, "at convergence")
                logger.info("%s converged in %d steps (%d rejected): E=%.12g mu=%.12g residual=%.2e",
                            self.name, iteration, self.flow_logger.rejections, energy_now, mu, residual)
                return self._result(values, iteration, True, dt)

        result = self._result(values, config.max_iters, False, dt)
        logger.warning("%s stopped at the iteration cap %d: residual=%.3e", self.name, config.max_iters,
                       result.el_residual)
        raise MaxItersReached(config.max_iters, result)


def gfdn_minimize(params: ProblemParams, potential: PotentialSpec, grid: RadialGrid,
                  flow_config: Optional[FlowConfig] = None, profile=None, verbose: bool = False) -> MinimizerResult:
    """
    Minimizes E_M on the unit sphere by the normalized gradient flow.

    Args:
        params (ProblemParams): The problem.
        potential (PotentialSpec): The trap.
        grid (RadialGrid): Solve grid.
        flow_config (Optional[FlowConfig]): Flow configuration (defaults: semi-implicit, scaled_w init).
        profile (Optional[GroundStateW]): w for the scaled_w initial state.
        verbose (bool): Print progress.

    Returns:
        MinimizerResult: The minimizer and diagnostics.
    """
    return GradientFlow(params, potential, grid, flow_config, profile=profile, verbose=verbose).solve()


def lagrange_multiplier(result: MinimizerResult, params: Optional[ProblemParams] = None, rtol: float = 1e-8) -> float:
    """
    mu = I(M) - ((p-1)/(p+1)) M^{(p-1)/2} int u^{p+1} |x|^{-b}, cross-checked against the Rayleigh quotient.

    Args:
        result (MinimizerResult): A converged minimizer.
        params (Optional[ProblemParams]): Defaults to result.params.
        rtol (float): Relative tolerance of the cross-check; a mismatch warns.

    Returns:
        float: The multiplier.
    """
    params = result.params if params is None else params
    parts = result.energy_parts
    mu = parts.total - (params.p - 1) / (params.p + 1) * params.coupling * parts.interaction
    if abs(mu - result.mu_rayleigh) > rtol * max(abs(mu), 1.0):
        message = f"multiplier identity {mu:.12g} disagrees with the Rayleigh quotient {result.mu_rayleigh:.12g}"
        logger.warning(message)
        warnings.warn(message, RuntimeWarning, stacklevel=2)
    return float(mu)
