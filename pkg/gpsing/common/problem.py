# gpsing/common/problem.py

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from gpsing.common.errors import NonpositiveAStar, RegimeViolation, UsageError


@dataclass(frozen=True)
class ProblemParams:
    """
    Parameters of the constrained problem I(M) = inf { E_M(u) : ||u||_2^2 = 1 }, where

        E_M(u) = int |grad u|^2 + V u^2 - (2 M^{(p-1)/2} / (p+1)) int |u|^{p+1} |x|^{-b}.

    Only build through `validate_params`, which enforces the subcritical regime.

    Args:
        N (int): Spatial dimension.
        p (float): Nonlinearity power.
        b (float): Singularity exponent of the weight |x|^{-b}.
        M (float): Interaction strength.
    """
    N: int
    p: float
    b: float
    M: float = 1.0

    @property
    def coupling(self) -> float:
        """The interaction prefactor M^{(p-1)/2} multiplying u^p |x|^{-b} in the Euler-Lagrange equation."""
        return self.M ** ((self.p - 1) / 2)

    def with_M(self, M: float) -> "ProblemParams":
        """Returns a validated copy with a different interaction strength."""
        return validate_params(self.N, self.p, self.b, M)

    def as_dict(self) -> dict:
        return {"N": self.N, "p": self.p, "b": self.b, "M": self.M}


def validate_params(N: int, p: float, b: float, M: float = 1.0) -> ProblemParams:
    """
    Checks (N, p, b, M) against 0 < b < min{2, N}, 1 < p < 1 + (4 - 2b)/N and M > 0.

    Args:
        N (int): Spatial dimension, an integer >= 1.
        p (float): Nonlinearity power.
        b (float): Singularity exponent.
        M (float): Interaction strength.

    Returns:
        ProblemParams: The validated parameters.

    Raises:
        RegimeViolation: Naming the first violated inequality (b is checked before p, as p's bound depends on b).
    """
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise RegimeViolation("N", "N>=1 integer", N)
    N = int(N)
    for name, value in (("p", p), ("b", b), ("M", M)):
        if not math.isfinite(value):
            raise RegimeViolation(name, "finite", value)

    if b <= 0:
        raise RegimeViolation("b", "b>0", b)
    b_upper = min(2, N)
    if b >= b_upper:
        raise RegimeViolation("b", f"b<{b_upper:g}", b)

    if p <= 1:
        raise RegimeViolation("p", "p>1", p)
    p_upper = 1 + (4 - 2 * b) / N
    if p >= p_upper:
        raise RegimeViolation("p", f"p<{p_upper:g}", p)

    if M <= 0:
        raise RegimeViolation("M", "M>0", M)

    return ProblemParams(N=N, p=float(p), b=float(b), M=float(M))


@dataclass(frozen=True)
class DerivedConstants:
    """
    Closed-form constants of the trap-free problem and the blow-up scaling.

    Attributes:
        lambda0: Limit energy coefficient, -(N(p-1) + 2b - 4) / (2(p+1) - N(p-1) - 2b) > 0.
        beta_energy: Energy exponent 2(p-1) / (4 - N(p-1) - 2b).
        beta_length: Length exponent (p-1) / (4 - N(p-1) - 2b).
        subcritical_gap: 4 - N(p-1) - 2b, positive in the valid regime.
        pohozaev_denominator: 2(p+1) - N(p-1) - 2b, positive in the valid regime.
        gradient_power: N(p-1)/2 + b, the power of ||grad u||_2 in the GN inequality.
        a_star: ||w||_2^2, unset until the profile w is computed.
        c_gn: Sharp Gagliardo-Nirenberg constant, unset until a_star is known.
    """
    lambda0: float
    beta_energy: float
    beta_length: float
    subcritical_gap: float
    pohozaev_denominator: float
    gradient_power: float
    a_star: Optional[float] = None
    c_gn: Optional[float] = None

    @property
    def kinetic_ratio(self) -> float:
        """||grad w||^2 / ||w||^2 = (N(p-1) + 2b) / (2(p+1) - N(p-1) - 2b) from the Pohozaev identity."""
        return 2 * self.gradient_power / self.pohozaev_denominator


def derived_constants(params: ProblemParams, a_star: Optional[float] = None) -> DerivedConstants:
    """
    Evaluates every closed-form constant for a validated parameter set.

    Args:
        params (ProblemParams): Validated parameters (M is not used).
        a_star (Optional[float]): If given, also fills a_star and the sharp GN constant.

    Returns:
        DerivedConstants: The constants.
    """
    N, p, b = params.N, params.p, params.b
    gap = 4 - N * (p - 1) - 2 * b
    denominator = 2 * (p + 1) - N * (p - 1) - 2 * b
    constants = DerivedConstants(
        lambda0=-(N * (p - 1) + 2 * b - 4) / denominator,
        beta_energy=2 * (p - 1) / gap,
        beta_length=(p - 1) / gap,
        subcritical_gap=gap,
        pohozaev_denominator=denominator,
        gradient_power=N * (p - 1) / 2 + b,
    )
    if a_star is not None:
        constants = with_a_star(params, constants, a_star)
    return constants


def with_a_star(params: ProblemParams, constants: DerivedConstants, a_star: float) -> DerivedConstants:
    """
    Fills a_star and C_GN = (2 theta / X)^{theta / 2} (X / (2(p+1))) a_star^{(p-1)/2}, where
    theta = N(p-1)/2 + b and X = 2(p+1) - N(p-1) - 2b.
    """
    _check_a_star(a_star)
    theta = constants.gradient_power
    x = constants.pohozaev_denominator
    c_gn = (2 * theta / x) ** (theta / 2) * (x / (2 * (params.p + 1))) * a_star ** ((params.p - 1) / 2)
    return replace(constants, a_star=float(a_star), c_gn=float(c_gn))


def _check_a_star(a_star: float) -> None:
    if a_star is None or not a_star > 0:
        raise NonpositiveAStar(f"a_star must be positive, got {a_star}")


def tilde_I_closed(params: ProblemParams, a_star: float, M: Optional[float] = None) -> float:
    """
    Trap-free minimum energy I~(M) = -lambda0 (M / a_star)^{beta_energy}.

    Args:
        params (ProblemParams): Validated parameters.
        a_star (float): ||w||_2^2.
        M (Optional[float]): Interaction strength, defaults to params.M.

    Returns:
        float: The (strictly negative) energy.
    """
    _check_a_star(a_star)
    M = params.M if M is None else M
    constants = derived_constants(params)
    return -constants.lambda0 * (M / a_star) ** constants.beta_energy


def alpha_tilde(params: ProblemParams, a_star: float, M: Optional[float] = None) -> float:
    """Concentration rate (M / a_star)^{beta_length} of the trap-free minimizer, the reciprocal of epsilon_of."""
    _check_a_star(a_star)
    M = params.M if M is None else M
    return (M / a_star) ** derived_constants(params).beta_length


def epsilon_of(params: ProblemParams, a_star: float, M: Optional[float] = None) -> float:
    """
    Blow-up length scale eps(M) = (M / a_star)^{-beta_length}; decreasing in M.

    Args:
        params (ProblemParams): Validated parameters.
        a_star (float): ||w||_2^2.
        M (Optional[float]): Interaction strength, defaults to params.M.

    Returns:
        float: The length scale.
    """
    _check_a_star(a_star)
    M = params.M if M is None else M
    return (M / a_star) ** (-derived_constants(params).beta_length)


def tilde_scaling_identity(params: ProblemParams, I1: float, M: Optional[float] = None) -> float:
    """I~(M) = M^{beta_energy} I~(1), exact."""
    M = params.M if M is None else M
    return M ** derived_constants(params).beta_energy * I1


def tilde_multiplier_closed(params: ProblemParams, a_star: float) -> float:
    """Lagrange multiplier of the I~(1) minimizer, mu~_1 = -(a_star)^{2(1-p) / (4 - 2b - N(p-1))} < 0."""
    _check_a_star(a_star)
    gap = derived_constants(params).subcritical_gap
    return -(a_star ** (2 * (1 - params.p) / gap))


def a_star_from_multiplier(params: ProblemParams, mu1: float) -> float:
    """Inverts tilde_multiplier_closed: a_star = (-mu1)^{-gap / (2(p-1))}."""
    if not mu1 < 0:
        raise NonpositiveAStar(f"the I~(1) multiplier must be negative, got {mu1}")
    gap = derived_constants(params).subcritical_gap
    return (-mu1) ** (-gap / (2 * (params.p - 1)))


@dataclass(frozen=True)
class PotentialSpec:
    """
    Radial trapping potential V(r) = gamma^2 r^s ("power_law") or V = 0 ("zero").

    Args:
        kind (str): "power_law" or "zero".
        s (float): Power-law exponent (> 0).
        gamma (float): Power-law coefficient (> 0).
    """
    kind: str = "power_law"
    s: float = 2.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("power_law", "zero"):
            raise UsageError(f"Unknown potential kind: {self.kind}")
        if self.kind == "power_law" and not (self.s > 0 and self.gamma > 0):
            raise UsageError(f"power_law needs s > 0 and gamma > 0, got s={self.s}, gamma={self.gamma}")

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls(kind="zero", s=0.0, gamma=0.0)

    @classmethod
    def harmonic(cls, gamma: float = 1.0) -> "PotentialSpec":
        return cls(kind="power_law", s=2.0, gamma=gamma)

    @classmethod
    def parse(cls, text: str) -> "PotentialSpec":
        """
        Parses the CLI form "zero" or "power:gamma,s" (e.g. "power:1,2" for r^2).
        """
        text = text.strip()
        if text == "zero":
            return cls.zero()
        if text.startswith("power:"):
            try:
                gamma, s = (float(part) for part in text[len("power:"):].split(","))
            except ValueError as exc:
                raise UsageError(f"--potential expects power:gamma,s, got {text!r}") from exc
            return cls(kind="power_law", s=s, gamma=gamma)
        raise UsageError(f"--potential expects zero or power:gamma,s, got {text!r}")

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def __call__(self, r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        r = np.asarray(r, dtype=float)
        if self.is_zero:
            return np.zeros_like(r)
        return self.gamma ** 2 * r ** self.s

    def label(self) -> str:
        return "zero" if self.is_zero else f"power:{self.gamma:g},{self.s:g}"
