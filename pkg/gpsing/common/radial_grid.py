# gpsing/common/radial_grid.py

import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import gamma as gamma_fn

from gpsing.common.errors import BadGridSpec, GridMismatch, WeightNotIntegrable

logger = logging.getLogger(__name__)

# Default reference grid: 20 natural length units, square grading towards the singular origin.
DEFAULT_RMAX = 20.0
DEFAULT_NODES = 4001
DEFAULT_GRADING = 2.0
BOUNDARY_TOL = 1e-8


class TruncationWarning(UserWarning):
    """A field has not decayed below the boundary tolerance at rmax."""


def surface_constant(N: int) -> float:
    """Area of the unit sphere in R^N, 2 pi^{N/2} / Gamma(N/2). Gives 2 for N = 1 (even extension)."""
    return float(2 * np.pi ** (N / 2) / gamma_fn(N / 2))


def _power_diff(lo: np.ndarray, hi: np.ndarray, q: float) -> np.ndarray:
    """hi^q - lo^q for 0 <= lo < hi and q > 0, without cancellation when lo is close to hi."""
    out = hi ** q
    inner = lo > 0
    ratio = np.log1p(-(hi[inner] - lo[inner]) / hi[inner])
    out[inner] = hi[inner] ** q * -np.expm1(q * ratio)
    return out


@dataclass(frozen=True)
class RadialGrid:
    """
    Graded radial grid r_i = rmax (i / (nodes - 1))^grading on [0, rmax].

    Grading > 1 clusters nodes near the singular origin. Quadrature weights for each weight shift are cached
    on the instance; grids are immutable and can be shared.

    Attributes:
        N: Spatial dimension.
        rmax: Truncation radius.
        nodes: Number of nodes (>= 3).
        grading: Grading exponent (>= 1).
        r: Node array, r[0] = 0 and r[-1] = rmax.
    """
    N: int
    rmax: float
    nodes: int
    grading: float = DEFAULT_GRADING
    r: np.ndarray = field(init=False, repr=False, compare=False)
    _weights: Dict[float, np.ndarray] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.nodes < 3 or int(self.nodes) != self.nodes:
            raise BadGridSpec(f"need an integer number of nodes >= 3, got {self.nodes}")
        if not self.rmax > 0:
            raise BadGridSpec(f"rmax must be positive, got {self.rmax}")
        if not self.grading >= 1:
            raise BadGridSpec(f"grading must be >= 1, got {self.grading}")
        if int(self.N) != self.N or self.N < 1:
            raise BadGridSpec(f"dimension must be an integer >= 1, got {self.N}")
        r = self.rmax * (np.arange(self.nodes) / (self.nodes - 1)) ** self.grading
        r[-1] = self.rmax
        if np.any(np.diff(r) <= 0):
            raise BadGridSpec("grid nodes are not strictly increasing (too many nodes for the grading?)")
        object.__setattr__(self, "r", r)

    @property
    def surface_const(self) -> float:
        return surface_constant(self.N)

    @property
    def h(self) -> np.ndarray:
        """Cell widths r_{i+1} - r_i."""
        return np.diff(self.r)

    @property
    def h_min(self) -> float:
        return float(self.r[1] - self.r[0])

    def scaled(self, factor: float) -> "RadialGrid":
        """The same node pattern with rmax multiplied by `factor`; nodes scale exactly, r_i -> factor * r_i."""
        return RadialGrid(self.N, self.rmax * factor, self.nodes, self.grading)

    def spec(self) -> dict:
        return {"N": self.N, "rmax": self.rmax, "nodes": self.nodes, "grading": self.grading}

    def weights(self, weight_shift: float = 0.0) -> np.ndarray:
        """
        Product-integration weights c_i with sum_i c_i f_i = S_N int_0^rmax f(r) r^{N-1+shift} dr for f linear on
        every cell. The power r^{N-1+shift} is integrated in closed form on each cell, so the weight is never
        evaluated at r = 0.

        Args:
            weight_shift (float): The shift gamma; -b gives the singular interaction weight.

        Returns:
            np.ndarray: Nodal weights (read-only view of a cached array).
        """
        key = float(weight_shift)
        if key in self._weights:
            return self._weights[key]

        k = self.N - 1 + key
        if k <= -1:
            raise WeightNotIntegrable(f"r^(N-1+gamma) is not integrable at 0 for gamma={key} <= -N={-self.N}")

        lo, hi = self.r[:-1], self.r[1:]
        cell = hi - lo
        m0 = _power_diff(lo, hi, k + 1) / (k + 1)
        m1 = _power_diff(lo, hi, k + 2) / (k + 2)
        left = (hi * m0 - m1) / cell
        right = (m1 - lo * m0) / cell

        w = np.zeros(self.nodes)
        w[:-1] += left
        w[1:] += right
        w *= self.surface_const
        w.setflags(write=False)
        self._weights[key] = w
        return w

    def cell_measure(self) -> np.ndarray:
        """S_N int_{cell} r^{N-1} dr for every cell; the P1 stiffness weights."""
        key = "cells"
        if key not in self._weights:
            m = self.surface_const * _power_diff(self.r[:-1], self.r[1:], self.N) / self.N
            m.setflags(write=False)
            self._weights[key] = m
        return self._weights[key]


@dataclass
class RadialField:
    """
    Radial function sampled on a RadialGrid. Values are finite at every node.

    Args:
        grid (RadialGrid): The grid.
        values (np.ndarray): Samples u(r_i).
    """
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.r.shape:
            raise GridMismatch(f"values shape {self.values.shape} does not match grid shape {self.grid.r.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("RadialField values must be finite at every node")

    @property
    def r(self) -> np.ndarray:
        return self.grid.r

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.values.copy())

    def __mul__(self, scalar: float) -> "RadialField":
        return RadialField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def normalized(self) -> "RadialField":
        """Copy scaled to unit L2 norm."""
        return self * (1.0 / np.sqrt(l2_norm_sq(self)))

    @classmethod
    def from_function(cls, grid: RadialGrid, fn) -> "RadialField":
        return cls(grid, fn(grid.r))


def build_grid(N: int, rmax: float = DEFAULT_RMAX, nodes: int = DEFAULT_NODES,
               grading: float = DEFAULT_GRADING) -> RadialGrid:
    """
    Builds the graded grid r_i = rmax (i / (nodes - 1))^grading.

    Args:
        N (int): Spatial dimension.
        rmax (float): Truncation radius (> 0).
        nodes (int): Number of nodes (>= 3).
        grading (float): Grading exponent (>= 1).

    Returns:
        RadialGrid: The grid.

    Raises:
        BadGridSpec: If the specification is invalid.
    """
    return RadialGrid(N=int(N), rmax=float(rmax), nodes=int(nodes), grading=float(grading))


def integrate(f: RadialField, weight_shift: float = 0.0) -> float:
    """
    S_N int_0^rmax f(r) r^{N-1+gamma} dr with f linear between nodes.

    Args:
        f (RadialField): The integrand's field factor.
        weight_shift (float): gamma > -N.

    Returns:
        float: The integral.
    """
    return float(f.grid.weights(weight_shift) @ f.values)


def l2_norm_sq(u: RadialField) -> float:
    return float(u.grid.weights(0.0) @ (u.values ** 2))


def h1_seminorm_sq(u: RadialField) -> float:
    """
    ||grad u||_2^2 using the cell-centred difference (u_{i+1} - u_i) / h_i on each cell, integrated exactly
    against r^{N-1}. Exact for the piecewise-linear interpolant of u.
    """
    slopes = np.diff(u.values) / u.grid.h
    return float(u.grid.cell_measure() @ (slopes ** 2))


def gradient(u: RadialField) -> np.ndarray:
    """Nodal u'(r_i) by second-order centred differences on the non-uniform grid (one-sided at the ends)."""
    return np.gradient(u.values, u.grid.r, edge_order=2)


def rescale(u: RadialField, eps: float, grid: Optional[RadialGrid] = None) -> RadialField:
    """
    v(r) = eps^{N/2} u(eps r), the mass-preserving dilation.

    Args:
        u (RadialField): The field.
        eps (float): Scale (> 0).
        grid (Optional[RadialGrid]): Target grid; defaults to u's grid.

    Returns:
        RadialField: The rescaled field; zero where eps r lies beyond u's rmax.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    target = u.grid if grid is None else grid
    if target.N != u.grid.N:
        raise GridMismatch(f"cannot rescale a dimension {u.grid.N} field onto a dimension {target.N} grid")
    x = eps * target.r
    # Node-aligned samples (e.g. eps-scaled grids) are copied exactly.
    if u.grid.nodes == target.nodes and np.allclose(x, u.grid.r, rtol=1e-13, atol=0.0):
        sampled = u.values.copy()
    else:
        interpolant = PchipInterpolator(u.grid.r, u.values, extrapolate=False)
        sampled = np.nan_to_num(interpolant(np.minimum(x, u.grid.rmax)), nan=0.0)
        sampled[x > u.grid.rmax] = 0.0
    return RadialField(target, eps ** (target.N / 2) * sampled)


def _check_same_grid(f: RadialField, g: RadialField) -> None:
    if f.grid != g.grid:
        raise GridMismatch(f"fields live on different grids: {f.grid} vs {g.grid}")


def sup_distance(f: RadialField, g: RadialField) -> float:
    """max_i |f(r_i) - g(r_i)|."""
    _check_same_grid(f, g)
    return float(np.max(np.abs(f.values - g.values)))


def h1_distance(f: RadialField, g: RadialField) -> float:
    """Full H^1 norm of f - g."""
    _check_same_grid(f, g)
    diff = RadialField(f.grid, f.values - g.values)
    return float(np.sqrt(h1_seminorm_sq(diff) + l2_norm_sq(diff)))


def check_boundary(
    u: RadialField, tol: float = BOUNDARY_TOL, name: str = "field", relative: bool = False
) -> bool:
    """
    Warns (TruncationWarning) if the field has not decayed at the truncation radius. The last two nodes are
    inspected, since Dirichlet-pinned solutions vanish identically at rmax.

    Args:
        u: The field.
        tol: Tolerance on the tail. Absolute by default.
        name: Label used in the warning.
        relative: Compare the tail against tol * max|u| instead.

    Returns:
        bool: True when the boundary value is within tolerance.
    """
    tail = float(np.max(np.abs(u.values[-2:])))
    scale = float(np.max(np.abs(u.values))) if relative else 1.0
    if tail > tol * scale:
        kind = "relative " if relative else ""
        message = (
            f"{name}: |u| = {tail:.3e} near rmax = {u.grid.rmax:g} exceeds {kind}tolerance {tol:g}; "
            f"consider a larger rmax"
        )
        logger.warning(message)
        warnings.warn(message, TruncationWarning, stacklevel=2)
        return False
    return True
