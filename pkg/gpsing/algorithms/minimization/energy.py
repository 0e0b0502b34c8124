from dataclasses import dataclass, asdict
from typing import Tuple

import numpy as np
from scipy.linalg import solve_banded

from gpsing.common.problem import PotentialSpec, ProblemParams
from gpsing.common.radial_grid import RadialField, RadialGrid


@dataclass(frozen=True)
class EnergyParts:
    """
    Breakdown of E_M(u) = kinetic + trap - coefficient * interaction, where coefficient = 2 M^{(p-1)/2} / (p+1)
    and interaction = int |u|^{p+1} |x|^{-b}.
    """
    kinetic: float
    trap: float
    interaction: float
    coefficient: float
    total: float

    def as_dict(self) -> dict:
        return asdict(self)


class DiscreteEnergy:
    """
    The discrete energy on a RadialGrid and its gradient.

    Kinetic energy uses P1 stiffness (cell slopes integrated exactly against r^{N-1}); mass, trap and
    interaction terms use the nodal product-integration weights, so the mass matrix C is diagonal and the
    discrete Hamiltonian is H(u) = C^{-1} (K u + C V u - M^{(p-1)/2} C_b |u|^{p-1} u). The last node carries a
    homogeneous Dirichlet condition; the origin gets the natural (Neumann) condition.

    Args:
        grid (RadialGrid): The grid.
        params (ProblemParams): Validated parameters; params.M sets the coupling.
        potential (PotentialSpec): The trap.
    """
    def __init__(self, grid: RadialGrid, params: ProblemParams, potential: PotentialSpec) -> None:
        self.grid = grid
        self.params = params
        self.potential = potential

        self.mass = grid.weights(0.0)
        self.singular_mass = grid.weights(-params.b)
        self.stiffness = grid.cell_measure() / grid.h ** 2
        self.trap_mass = self.mass * potential(grid.r)
        self.coupling = params.coupling
        self.coefficient = 2 * self.coupling / (params.p + 1)

        # Interior tridiagonal stiffness pattern; the last node is pinned to zero
        s = self.stiffness
        self._stiff_diag = np.concatenate(([0.0], s[:-1])) + s
        self._stiff_off = -s[:-1]
        self._dual = self.banded(self.mass[:-1])

    def banded(self, extra_diagonal: np.ndarray) -> np.ndarray:
        """K + diag(extra) on the interior nodes in the (1, 1) banded storage of scipy.linalg.solve_banded."""
        out = np.zeros((3, self.grid.nodes - 1))
        out[0, 1:] = self._stiff_off
        out[1] = self._stiff_diag + extra_diagonal
        out[2, :-1] = self._stiff_off
        return out

    def apply_stiffness(self, values: np.ndarray) -> np.ndarray:
        flux = self.stiffness * np.diff(values)
        out = np.zeros_like(values)
        out[1:] += flux
        out[:-1] -= flux
        return out

    def parts(self, values: np.ndarray) -> EnergyParts:
        kinetic = float(np.dot(self.stiffness, np.diff(values) ** 2))
        trap = float(np.dot(self.trap_mass, values ** 2))
        interaction = float(np.dot(self.singular_mass, np.abs(values) ** (self.params.p + 1)))
        total = kinetic + trap - self.coefficient * interaction
        return EnergyParts(kinetic, trap, interaction, self.coefficient, total)

    def total(self, values: np.ndarray) -> float:
        return self.parts(values).total

    def norm_sq(self, values: np.ndarray) -> float:
        return float(np.dot(self.mass, values ** 2))

    def normalize(self, values: np.ndarray) -> np.ndarray:
        return values / np.sqrt(self.norm_sq(values))

    def nonlinear_weight(self, values: np.ndarray) -> np.ndarray:
        """Nodal M^{(p-1)/2} C_b |u|^{p-1}, the frozen interaction potential times the mass."""
        return self.coupling * self.singular_mass * np.abs(values) ** (self.params.p - 1)

    def hamiltonian(self, values: np.ndarray) -> np.ndarray:
        """H(u) at every node (C-weighted gradient of E/2)."""
        weighted = self.apply_stiffness(values) + (self.trap_mass - self.nonlinear_weight(values)) * values
        return weighted / self.mass

    def multiplier(self, values: np.ndarray) -> float:
        """Rayleigh form mu = <H(u), u>_C / ||u||^2 = (kinetic + trap - M^{(p-1)/2} interaction) / ||u||^2."""
        parts = self.parts(values)
        return (parts.kinetic + parts.trap - self.coupling * parts.interaction) / self.norm_sq(values)

    def residual(self, values: np.ndarray) -> Tuple[float, float]:
        """
        Residual of -Delta u + V u - M^{(p-1)/2} u^p |x|^{-b} = mu u on the interior nodes, measured in the
        discrete dual norm ||d||_* = (d^T (K + C)^{-1} d)^{1/2} of the weighted defect d = C (H(u) - mu u).

        Returns:
            Tuple[float, float]: (mu, ||d||_* / (||u|| max(|mu|, 1)^{1/2})), comparable across blow-up dilations.
        """
        mu = self.multiplier(values)
        weighted = (self.apply_stiffness(values) + (self.trap_mass - self.nonlinear_weight(values)) * values
                    - mu * self.mass * values)[:-1]
        dual = solve_banded((1, 1), self._dual, weighted, check_finite=False)
        norm = np.sqrt(max(float(np.dot(weighted, dual)), 0.0) / self.norm_sq(values))
        return mu, float(norm / np.sqrt(max(abs(mu), 1.0)))


def evaluate_E(u: RadialField, params: ProblemParams, potential: PotentialSpec) -> EnergyParts:
    """
    Evaluates E_M(u) and its parts on u's grid.

    Args:
        u (RadialField): The (normalized) field.
        params (ProblemParams): Validated parameters.
        potential (PotentialSpec): The trap.

    Returns:
        EnergyParts: kinetic, trap, interaction integral, its coefficient and the total.
    """
    return DiscreteEnergy(u.grid, params, potential).parts(u.values)
