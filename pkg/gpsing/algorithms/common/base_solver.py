from abc import ABC, abstractmethod
from typing import Any

from gpsing.common.problem import ProblemParams
from gpsing.common.radial_grid import RadialGrid


class BaseSolver(ABC):
    """
    Base class from which all radial solvers inherit. Contains common attributes for:
    - Profile // shooting (ShootingSolver)
    - Minimization // normalized gradient flow (GradientFlow)

    Solvers are deterministic: identical (params, grid, configuration) give bit-identical results.
    """
    def __init__(self, params: ProblemParams, grid: RadialGrid, verbose: bool = False) -> None:

        self.name = "Base Solver"
        self.params = params
        self.grid = grid
        self.verbose = verbose

        if grid.N != params.N:
            raise ValueError(f"grid dimension {grid.N} does not match problem dimension {params.N}")

    @abstractmethod
    def reset(self) -> None:
        """
        Clears per-solve state so the same solver can be re-run, e.g. with a different initial guess.
        """
        raise NotImplementedError

    @abstractmethod
    def solve(self) -> Any:
        """Run the solver to convergence and return its result object."""
        raise NotImplementedError
