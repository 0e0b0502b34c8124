from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.stats import linregress

from gpsing.common.errors import NonpositiveTail
from gpsing.common.radial_grid import RadialField, gradient

DEFAULT_WINDOW_FRACTIONS = (0.4, 0.7)
ACCEPTED_QUALITY = 0.99


@dataclass(frozen=True)
class DecayFit:
    """
    Exponential tail fit u(r) ~ C exp(-rate r).

    Attributes:
        rate: Least-squares slope of -log u on the window.
        window: (r_lo, r_hi).
        theta: min(rate^2, 1 - 1e-6), the exponent of the gradient bound.
        quality: |correlation| of the fit.
    """
    rate: float
    window: Tuple[float, float]
    theta: float
    quality: float

    @property
    def accepted(self) -> bool:
        return self.rate > 0 and self.quality >= ACCEPTED_QUALITY


def decay_fit(field: RadialField, window: Optional[Tuple[float, float]] = None, gradient_tail: bool = False) -> DecayFit:
    """
    Fits the exponential decay rate of a field (or of |u'|) on a tail window.

    Args:
        field (RadialField): The field, positive on the window.
        window (Optional[Tuple[float, float]]): (r_lo, r_hi); defaults to (0.4 rmax, 0.7 rmax).
        gradient_tail (bool): Fit |u'| instead of u.

    Returns:
        DecayFit: The fit.

    Raises:
        NonpositiveTail: If the fitted quantity is not positive on the window or the window holds < 3 nodes.
    """
    r = field.grid.r
    if window is None:
        window = (DEFAULT_WINDOW_FRACTIONS[0] * field.grid.rmax, DEFAULT_WINDOW_FRACTIONS[1] * field.grid.rmax)
    r_lo, r_hi = window
    mask = (r >= r_lo) & (r <= r_hi)
    tail = np.abs(gradient(field)) if gradient_tail else field.values
    tail = tail[mask]
    if mask.sum() < 3:
        raise NonpositiveTail(f"decay window {window} contains fewer than 3 nodes")
    if np.any(tail <= 0):
        raise NonpositiveTail(f"field is not positive on the decay window {window}")

    fit = linregress(r[mask], -np.log(tail))
    rate = float(fit.slope)
    return DecayFit(rate=rate, window=(float(r_lo), float(r_hi)), theta=min(rate ** 2, 1 - 1e-6),
                    quality=float(abs(fit.rvalue)))
