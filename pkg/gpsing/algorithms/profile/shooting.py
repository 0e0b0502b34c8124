import logging
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import kve

from gpsing.algorithms.common.base_solver import BaseSolver
from gpsing.algorithms.profile.ground_state import GroundStateW, summarize_profile
from gpsing.common.errors import BisectionStalled, NoBracket
from gpsing.common.problem import ProblemParams
from gpsing.common.radial_grid import RadialField, RadialGrid, check_boundary

logger = logging.getLogger(__name__)

# Trajectory labels: w crosses zero (initial height too large) or w' turns positive (too small).
CROSSES = "crosses"
TURNS = "turns"


class ShootingSolver(BaseSolver):
    """
    Shooting method for the radial ODE w'' + ((N-1)/r) w' = w - w^p r^{-b}.

    Trajectories start at the first interior node from the origin series
        w(r) = w0 - w0^p r^{2-b} / ((2-b)(N-b)) + w0 r^2 / (2N),
    and w0 is bisected between trajectories that cross zero and trajectories that turn upwards. The separating
    trajectory is followed while both bracketing trajectories agree to `separation_tol` (relative); beyond that the
    linear decaying solution r^{1-N/2} K_{N/2-1}(r) is matched on continuously.

    Args:
        params (ProblemParams): (N, p, b).
        grid (RadialGrid): Output grid.
        bracket (Optional[Tuple[float, float]]): (lo, hi) values of w0 with lo turning and hi crossing. Searched
            outwards from (1, 2) when omitted.
        w0_tol (float): Absolute bisection tolerance on w0.
        rtol (float): Relative tolerance of the ODE integrator.
        separation_tol (float): Relative gap between the bracketing trajectories at which the tail is matched.
        max_bisections (int): Bisection cap.
        verbose (bool): Print bisection progress.
    """
    def __init__(
        self,
        params: ProblemParams,
        grid: RadialGrid,
        bracket: Optional[Tuple[float, float]] = None,
        w0_tol: float = 1e-12,
        rtol: float = 1e-11,
        separation_tol: float = 1e-6,
        max_bisections: int = 200,
        verbose: bool = False,
    ) -> None:
        super().__init__(params, grid, verbose)
        self.name = "Shooting"
        self.bracket = bracket
        self.w0_tol = w0_tol
        self.rtol = rtol
        self.atol = 1e-15
        self.separation_tol = separation_tol
        self.max_bisections = max_bisections

        # Classification runs well past rmax so that every inexact w0 shows its fate
        self.shoot_radius = max(2 * grid.rmax, grid.rmax + 20.0)
        self.r_start = float(grid.r[1])

        self.shots = 0
        self.reset()

    def reset(self) -> None:
        self.shots = 0

    def series_start(self, w0: float) -> np.ndarray:
        """(w, w') at r_start from the two-term origin series plus the r^2 term."""
        N, p, b = self.params.N, self.params.p, self.params.b
        r = self.r_start
        w = w0 - w0 ** p * r ** (2 - b) / ((2 - b) * (N - b)) + w0 * r ** 2 / (2 * N)
        dw = -w0 ** p * r ** (1 - b) / (N - b) + w0 * r / N
        return np.array([w, dw])

    def _rhs(self, r: float, y: np.ndarray) -> np.ndarray:
        N, p, b = self.params.N, self.params.p, self.params.b
        w, dw = y
        return np.array([dw, w - np.sign(w) * abs(w) ** p * r ** (-b) - (N - 1) / r * dw])

    def shoot(self, w0: float):
        """
        Integrates one trajectory until it crosses zero, turns upwards, or reaches the shooting radius.

        Returns:
            Tuple[str, OdeResult]: The label (CROSSES or TURNS) and the integration result with dense output.
        """
        def crosses(r, y):
            return y[0]
        crosses.terminal = True
        crosses.direction = -1

        def turns(r, y):
            return y[1]
        turns.terminal = True
        turns.direction = 1

        sol = solve_ivp(self._rhs, (self.r_start, self.shoot_radius), self.series_start(w0), method="DOP853",
                        rtol=self.rtol, atol=self.atol, events=(crosses, turns), dense_output=True)
        self.shots += 1
        if sol.t_events[0].size:
            return CROSSES, sol
        if sol.t_events[1].size:
            return TURNS, sol
        # No event before the shooting radius: decide by the final state
        w_end, dw_end = sol.y[:, -1]
        return (CROSSES if w_end <= 0 else TURNS), sol

    def _find_bracket(self) -> Tuple[float, float]:
        if self.bracket is not None:
            lo, hi = self.bracket
            if not (0 < lo < hi) or self.shoot(lo)[0] != TURNS or self.shoot(hi)[0] != CROSSES:
                raise NoBracket(f"bracket {self.bracket} does not separate turning from crossing trajectories")
            return float(lo), float(hi)

        lo, hi = 1.0, 2.0
        for _ in range(60):
            if self.shoot(lo)[0] == TURNS:
                break
            lo /= 2
        else:
            raise NoBracket("no turning trajectory found below w0 = 1")
        hi = max(hi, 2 * lo)
        for _ in range(60):
            if self.shoot(hi)[0] == CROSSES:
                break
            lo = hi
            hi *= 2
        else:
            raise NoBracket("no crossing trajectory found")
        return lo, hi

    def bisect(self) -> Tuple[float, float]:
        """
        Bisects w0 to the absolute tolerance.

        Returns:
            Tuple[float, float]: The final (lo, hi) bracket.

        Raises:
            BisectionStalled: If the cap is reached with the bracket still wider than w0_tol.
        """
        lo, hi = self._find_bracket()
        for iteration in range(self.max_bisections):
            if hi - lo <= self.w0_tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                # Floating-point resolution reached
                break
            label, _ = self.shoot(mid)
            if label == TURNS:
                lo = mid
            else:
                hi = mid
            if self.verbose:
                print(f"Bisection {iteration}: w0 in [{lo:.15f}, {hi:.15f}]")
        else:
            if hi - lo > self.w0_tol:
                raise BisectionStalled(f"bracket width {hi - lo:.3e} above tolerance {self.w0_tol:g}")
        return lo, hi

    def _decaying_tail(self, r: np.ndarray, r_match: float) -> np.ndarray:
        """Linear decaying solution r^{1-N/2} K_{N/2-1}(r), normalized to 1 at r_match."""
        nu = self.params.N / 2 - 1
        shape = (r / r_match) ** (1 - self.params.N / 2) * kve(nu, r) / kve(nu, r_match)
        return shape * np.exp(-(r - r_match))

    def solve(self) -> GroundStateW:
        lo, hi = self.bisect()
        _, sol_lo = self.shoot(lo)
        _, sol_hi = self.shoot(hi)

        r = self.grid.r
        reach = min(sol_lo.t[-1], sol_hi.t[-1])
        inside = (r >= self.r_start) & (r <= reach)
        w_lo = sol_lo.sol(r[inside])[0]
        w_hi = sol_hi.sol(r[inside])[0]
        w_mid = 0.5 * (w_lo + w_hi)

        # Follow the separatrix while the bracketing trajectories agree and stay positive
        trusted = (np.abs(w_lo - w_hi) <= self.separation_tol * np.abs(w_mid)) & (w_mid > 0)
        n_trusted = int(np.argmin(trusted)) if not np.all(trusted) else int(trusted.size)
        if n_trusted < 2:
            raise BisectionStalled("bracketing trajectories separate immediately; refine w0_tol or the grid")

        values = np.zeros_like(r)
        values[0] = 0.5 * (lo + hi)
        first = int(np.argmax(inside))
        values[first:first + n_trusted] = w_mid[:n_trusted]
        match_index = first + n_trusted - 1
        r_match = float(r[match_index])
        if match_index < r.size - 1:
            values[match_index + 1:] = values[match_index] * self._decaying_tail(r[match_index + 1:], r_match)

        profile = RadialField(self.grid, values)
        check_boundary(profile, name="w (shooting)", relative=True)
        logger.info("shooting: w0 = %.12f after %d shots, tail matched at r = %.3f", values[0], self.shots, r_match)

        return summarize_profile(profile, self.params, "shooting", {
            "bracket": [lo, hi],
            "shots": self.shots,
            "r_match": r_match,
        })


def solve_w_shooting(params: ProblemParams, grid: RadialGrid, bracket: Optional[Tuple[float, float]] = None,
                     **kwargs) -> GroundStateW:
    """
    Computes w by shooting from the origin series and bisecting on w(0).

    Args:
        params (ProblemParams): (N, p, b).
        grid (RadialGrid): Output grid.
        bracket (Optional[Tuple[float, float]]): Initial (lo, hi) for w(0).
        **kwargs: Passed to ShootingSolver.

    Returns:
        GroundStateW: The profile, method "shooting".
    """
    return ShootingSolver(params, grid, bracket=bracket, **kwargs).solve()
