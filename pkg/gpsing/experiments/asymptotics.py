"""
Analysis of M -> infinity sweeps: the per-M table, profile convergence of the rescaled minimizers w_k towards
w / sqrt(a_star), and the uniform bounds on ||grad w_k||^2 and int w_k^{p+1} |x|^{-b}.
"""
import json
import logging
import math
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from gpsing.algorithms.profile.ground_state import GroundStateW, singular_integral
from gpsing.common.decay import DecayFit, decay_fit  # noqa: F401  (re-exported)
from gpsing.common.errors import IOFailure, ProfileMissing, UsageError
from gpsing.common.problem import ProblemParams, derived_constants
from gpsing.common.radial_grid import RadialField, h1_distance, h1_seminorm_sq, sup_distance
from gpsing.utils.general import to_jsonable

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["M", "I_M", "ratio", "trap_mass", "eps", "mu_eps2", "sup_dist", "h1_dist", "sing_mass",
               "decay_rate", "converged"]

ASSUMPTIONS = [
    "minimizers are computed in the class of radial functions",
    "the computed branch is taken as the unique minimizer; the concentration limit is stated along subsequences",
]


@dataclass
class ScalingRow:
    """
    Diagnostics of one trapped solve at interaction strength M.

    The first eleven fields form the CSV table; the rest are reported in JSON. Failed solves keep their M and eps
    with NaN measurements and the error message.
    """
    M: float
    I_M: float
    ratio: float
    trap_mass: float
    eps: float
    mu_eps2: float
    sup_dist: float
    h1_dist: float
    sing_mass: float
    decay_rate: float
    converged: bool
    mu: float = math.nan
    tilde_I: float = math.nan
    tilde_I_discrete: float = math.nan
    energy_gap: float = math.nan
    upper_bound: float = math.nan
    sandwich: bool = False
    grad_sq: float = math.nan
    decay_quality: float = math.nan
    grad_decay_rate: float = math.nan
    grad_decay_quality: float = math.nan
    iters: int = 0
    el_residual: float = math.nan
    error: Optional[str] = None
    w_k: Optional[RadialField] = field(default=None, repr=False, compare=False)

    @classmethod
    def failed(cls, M: float, eps: float, error: str) -> "ScalingRow":
        nan = math.nan
        return cls(M=M, I_M=nan, ratio=nan, trap_mass=nan, eps=eps, mu_eps2=nan, sup_dist=nan, h1_dist=nan,
                   sing_mass=nan, decay_rate=nan, converged=False, error=error)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "w_k"}


@dataclass
class ScalingReport:
    """
    Ordered sweep rows plus the constants they are measured against.

    Attributes:
        params: (N, p, b).
        a_star: ||w||_2^2 of the profile used.
        potential: Label of the trap.
        rows: One row per M, increasing.
        metadata: Resolved configuration, code version and modelling assumptions.
    """
    params: ProblemParams
    a_star: float
    potential: str
    rows: List[ScalingRow] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.metadata.setdefault("assumptions", list(ASSUMPTIONS))

    @property
    def lambda0(self) -> float:
        return derived_constants(self.params).lambda0

    @property
    def converged_rows(self) -> List[ScalingRow]:
        return [row for row in self.rows if row.converged]

    def to_frame(self, extended: bool = False) -> pd.DataFrame:
        frame = pd.DataFrame([row.as_dict() for row in self.rows])
        if frame.empty:
            frame = pd.DataFrame(columns=CSV_COLUMNS)
        return frame if extended else frame[CSV_COLUMNS]

    def to_csv(self, path: str) -> str:
        """Writes the CSV table (comma separated, header row, LF line endings)."""
        try:
            self.to_frame().to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
        except OSError as exc:
            raise IOFailure(f"cannot write {path}: {exc}") from exc
        return path

    def as_dict(self) -> dict:
        return {
            "params": {"N": self.params.N, "p": self.params.p, "b": self.params.b},
            "a_star": self.a_star,
            "lambda0": self.lambda0,
            "potential": self.potential,
            "rows": [row.as_dict() for row in self.rows],
            "trends": self.trends(),
            "metadata": self.metadata,
        }

    def to_json(self, path: str) -> str:
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(to_jsonable(self.as_dict()), f, indent=2, sort_keys=True)
        except OSError as exc:
            raise IOFailure(f"cannot write {path}: {exc}") from exc
        return path

    def trends(self) -> Dict[str, bool]:
        """Whether each limit quantity approaches its limit monotonically across the converged rows."""
        rows = self.converged_rows
        if len(rows) < 2:
            return {}
        lambda0 = self.lambda0
        return {
            "ratio_error_decreasing": _decreasing([abs(row.ratio + lambda0) for row in rows]),
            "trap_mass_decreasing": _decreasing([row.trap_mass for row in rows]),
            "multiplier_error_decreasing": _decreasing([abs(row.mu_eps2 + 1) for row in rows]),
            "sup_dist_decreasing": _decreasing([row.sup_dist for row in rows]),
            "h1_dist_decreasing": _decreasing([row.h1_dist for row in rows]),
        }


def _decreasing(values: List[float]) -> bool:
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) < 0))


@dataclass(frozen=True)
class ConvergenceSummary:
    """Distances of w_k to w / sqrt(a_star) per converged row."""
    table: pd.DataFrame = field(compare=False)
    sup_decreasing: bool
    h1_decreasing: bool
    final_sup_relative: float


def profile_convergence(report: ScalingReport, profile: Optional[GroundStateW]) -> ConvergenceSummary:
    """
    Distances ||w_k - w / sqrt(a_star)|| in sup and H^1 norms for every converged row.

    Rows that still hold w_k are measured afresh against `profile`; the others keep their recorded distances.

    Raises:
        ProfileMissing: If no profile is given.
    """
    if profile is None:
        raise ProfileMissing("profile_convergence needs the ground state w")
    target = profile.normalized_profile
    records = []
    for row in report.converged_rows:
        if row.w_k is not None and row.w_k.grid == target.grid:
            sup, h1 = sup_distance(row.w_k, target), h1_distance(row.w_k, target)
        else:
            sup, h1 = row.sup_dist, row.h1_dist
        records.append({"M": row.M, "sup_dist": sup, "h1_dist": h1})
    table = pd.DataFrame(records, columns=["M", "sup_dist", "h1_dist"])
    peak = float(np.max(target.values))
    return ConvergenceSummary(
        table=table,
        sup_decreasing=_decreasing(table["sup_dist"].tolist()),
        h1_decreasing=_decreasing(table["h1_dist"].tolist()),
        final_sup_relative=float(table["sup_dist"].iloc[-1] / peak) if len(table) else math.nan,
    )


def uniform_bounds_check(report: ScalingReport, profile: Optional[GroundStateW] = None) -> dict:
    """
    Bounds 0 < C1 <= ||grad w_k||^2 <= C2 and 0 < C1' <= int w_k^{p+1} |x|^{-b} <= C2' across the converged rows,
    and the Pohozaev ratio (2 a_star^{(p-1)/2} / (p+1)) sing_mass / ||grad w_k||^2 normalized by its limit
    4 / (N(p-1) + 2b), which tends to 1.

    Args:
        report (ScalingReport): The sweep.
        profile (Optional[GroundStateW]): w; when given, ||grad w_k||^2 is also compared with its limit
            ||grad w||^2 / a_star.

    Returns:
        dict: grad_min, grad_max, sing_min, sing_max, bounded (all four positive and finite), pohozaev_limit and
        pohozaev_ratio (per row, normalized), final_ratio_error; with a profile also gradient_limit and
        gradient_error (per row, relative).

    Raises:
        UsageError: If fewer than two rows converged.
    """
    rows = report.converged_rows
    if len(rows) < 2:
        raise UsageError(f"uniform_bounds_check needs at least two converged rows, got {len(rows)}")
    params = report.params
    grad = np.array([row.grad_sq for row in rows])
    sing = np.array([row.sing_mass for row in rows])
    limit = 4 / (2 * derived_constants(params).gradient_power)
    ratios = 2 * report.a_star ** ((params.p - 1) / 2) / (params.p + 1) * sing / grad / limit
    bounds = [grad.min(), grad.max(), sing.min(), sing.max()]
    summary = {
        "grad_min": float(grad.min()),
        "grad_max": float(grad.max()),
        "sing_min": float(sing.min()),
        "sing_max": float(sing.max()),
        "bounded": bool(all(np.isfinite(bounds)) and min(bounds) > 0),
        "pohozaev_limit": float(limit),
        "pohozaev_ratio": [float(value) for value in ratios],
        "final_ratio_error": float(abs(ratios[-1] - 1)),
    }
    if profile is not None:
        grad_limit = limit_gradient(profile)
        summary["gradient_limit"] = grad_limit
        summary["gradient_error"] = [float(abs(value - grad_limit) / grad_limit) for value in grad]
    return summary


def limit_singular_mass(profile: GroundStateW) -> float:
    """int (w / sqrt(a_star))^{p+1} |x|^{-b}, the limit of sing_mass along the sweep."""
    return singular_integral(profile.normalized_profile, profile.params)


def limit_gradient(profile: GroundStateW) -> float:
    """||grad w||^2 / a_star, the limit of ||grad w_k||^2 along the sweep."""
    return h1_seminorm_sq(profile.normalized_profile)
