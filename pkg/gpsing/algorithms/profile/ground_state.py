from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from gpsing.common.decay import decay_fit
from gpsing.common.errors import ZeroField
from gpsing.common.problem import DerivedConstants, ProblemParams, derived_constants
from gpsing.common.radial_grid import RadialField, h1_seminorm_sq, integrate, l2_norm_sq

POHOZAEV_TOL = 1e-4


@dataclass
class GroundStateW:
    """
    The positive radial solution w of -Delta w + w - w^p |x|^{-b} = 0.

    Attributes:
        profile: w sampled on the reference grid.
        params: The (N, p, b) it solves (M unused).
        a_star: ||w||_2^2, the single source of truth for every downstream scaling formula.
        w0: w(0).
        pohozaev_res: Relative residuals of the two Pohozaev equalities.
        decay: Fitted tail rate (about 1).
        method: "flow", "shooting" or "cross_validated".
        diagnostics: Method-specific extras (multiplier, bisection bracket, decay quality, monotonicity, ...).
    """
    profile: RadialField
    params: ProblemParams
    a_star: float
    w0: float
    pohozaev_res: Tuple[float, float]
    decay: float
    method: str
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def constants(self) -> DerivedConstants:
        return derived_constants(self.params, a_star=self.a_star)

    @property
    def normalized_profile(self) -> RadialField:
        """w / sqrt(a_star), the limit of the rescaled minimizers."""
        return self.profile * (1.0 / np.sqrt(self.a_star))

    def header(self) -> dict:
        """JSON header of a profile export."""
        return {
            "N": self.params.N, "p": self.params.p, "b": self.params.b,
            "a_star": self.a_star, "w0": self.w0,
            "pohozaev_res": list(self.pohozaev_res), "decay": self.decay, "method": self.method,
        }


def singular_integral(u: RadialField, params: ProblemParams) -> float:
    """int |u|^{p+1} |x|^{-b} dx."""
    return integrate(RadialField(u.grid, np.abs(u.values) ** (params.p + 1)), -params.b)


def pohozaev_residual(w: RadialField, params: ProblemParams) -> Tuple[float, float]:
    """
    Relative residuals of ||grad w||^2 = (N(p-1) + 2b) / (2(p+1)) int w^{p+1} |x|^{-b}
    and ||grad w||^2 = (N(p-1) + 2b) / (2(p+1) - N(p-1) - 2b) ||w||^2, both divided by ||grad w||^2.

    Args:
        w (RadialField): A positive field.
        params (ProblemParams): (N, p, b).

    Returns:
        Tuple[float, float]: (res1, res2).
    """
    constants = derived_constants(params)
    kinetic = h1_seminorm_sq(w)
    if kinetic == 0:
        raise ZeroField("Pohozaev residuals are undefined for a constant field")
    first = 2 * constants.gradient_power / (2 * (params.p + 1)) * singular_integral(w, params)
    second = constants.kinetic_ratio * l2_norm_sq(w)
    return abs(kinetic - first) / kinetic, abs(kinetic - second) / kinetic


def gn_ratio(u: RadialField, params: ProblemParams, c_gn: float) -> float:
    """
    C_GN int |u|^{p+1} |x|^{-b} / (||grad u||^{theta} ||u||^{p+1-theta}), theta = N(p-1)/2 + b.
    At most 1 by the sharp Gagliardo-Nirenberg inequality, with equality at u = w; invariant under dilations.

    Raises:
        ZeroField: If u or its gradient vanishes.
    """
    kinetic = h1_seminorm_sq(u)
    mass = l2_norm_sq(u)
    if kinetic <= 0 or mass <= 0:
        raise ZeroField("gn_ratio needs a nonzero, non-constant field")
    theta = derived_constants(params).gradient_power
    denominator = kinetic ** (theta / 2) * mass ** ((params.p + 1 - theta) / 2)
    return float(c_gn * singular_integral(u, params) / denominator)


def summarize_profile(profile: RadialField, params: ProblemParams, method: str,
                      diagnostics: Dict[str, Any]) -> GroundStateW:
    """Assembles a GroundStateW: a_star, Pohozaev residuals, tail fit on [rmax/2, 3 rmax/4] and monotonicity."""
    rmax = profile.grid.rmax
    fit = decay_fit(profile, window=(0.5 * rmax, 0.75 * rmax))
    diagnostics = dict(diagnostics)
    diagnostics.update({
        "decay_quality": fit.quality,
        "decay_window": list(fit.window),
        "monotone": bool(np.all(np.diff(profile.values) <= 0)),
    })
    return GroundStateW(
        profile=profile,
        params=params,
        a_star=l2_norm_sq(profile),
        w0=float(profile.values[0]),
        pohozaev_res=pohozaev_residual(profile, params),
        decay=fit.rate,
        method=method,
        diagnostics=diagnostics,
    )
