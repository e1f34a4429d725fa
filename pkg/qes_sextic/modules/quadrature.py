from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gamma, gammaincc, roots_legendre

from ..errors import NumericalError
from ..models.config import DEFAULT_TOL_QUAD, Settings

logger = logging.getLogger(__name__)

TailMass = Callable[[float], float]


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss–Legendre rule on [−L, L].

    Nodes are ascending and mirror-symmetric, ``nodes[i] == -nodes[-1 - i]``,
    with matching weights.
    """

    nodes: np.ndarray
    weights: np.ndarray
    half_width: float
    panels: int
    order: int

    @property
    def design_degree(self) -> int:
        return 2 * self.order - 1

    @property
    def panel_width(self) -> float:
        return 2.0 * self.half_width / self.panels

    def integrate(self, values: ArrayLike):
        total = np.dot(self.weights, np.asarray(values))
        return complex(total) if np.iscomplexobj(total) else float(total)


def weight_moment(q: int, beta: float = 0.25) -> float:
    """Closed form of ∫ x^q exp(−2βx⁴) dx over the real line.

    Parameters
    ----------
    q : int
        Even, non-negative power.
    beta : float
        Quartic weight parameter; 1/4 is the variational density weight exp(−x⁴/2),
        1/8 the amplitude weight exp(−x⁴/4).
    """
    if q < 0 or q % 2:
        raise ValueError(f"moment order must be even and non-negative, got {q}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    s = (q + 1) / 4.0
    return 0.5 * (2.0 * beta) ** (-s) * float(gamma(s))


def build_rule(half_width: float, panels: int = 128, order: int = 16) -> QuadratureRule:
    if not (half_width > 0 and math.isfinite(half_width)):
        raise ValueError(f"half width must be positive and finite, got {half_width}")
    if panels < 1 or order < 1:
        raise ValueError(f"panels and order must be positive, got {panels} x {order}")
    x, w = roots_legendre(order)
    edges = np.linspace(-half_width, half_width, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(
        nodes=nodes,
        weights=weights,
        half_width=float(half_width),
        panels=panels,
        order=order,
    )


def quartic_tail(q: int, beta: float = 0.25) -> TailMass:
    """Mass of x^q exp(−2βx⁴) outside [−L, L]."""
    total = weight_moment(q, beta)
    s = (q + 1) / 4.0
    return lambda L: total * float(gammaincc(s, 2.0 * beta * L**4))


def sampled_tail(density: Callable[[np.ndarray], np.ndarray], order: int = 64) -> TailMass:
    """Tail estimate from samples of an even-decaying density on [L, 2L] and its mirror."""
    x, w = roots_legendre(order)

    def tail(L: float) -> float:
        pts = 1.5 * L + 0.5 * L * x
        vals = np.asarray(density(pts)) + np.asarray(density(-pts))
        return float(0.5 * L * np.dot(w, vals))

    return tail


def choose_half_width(
    tail_mass: TailMass,
    tol: float,
    start: float = 1.0,
    max_half_width: float = 1e4,
    rtol: float = 1e-3,
) -> float:
    """Smallest L (to relative ``rtol``) with tail_mass(L) < tol, found by doubling then bisection."""
    if not tol > 0:
        raise ValueError("tail tolerance must be positive")
    hi = float(start)
    while tail_mass(hi) >= tol:
        hi *= 2.0
        if hi > max_half_width:
            raise NumericalError(f"tail mass stays above {tol:g} beyond L = {max_half_width:g}")
    lo = 0.0 if hi == start else hi / 2.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if tail_mass(mid) < tol:
            hi = mid
        else:
            lo = mid
    logger.debug("half width chosen", extra={"half_width": hi, "tol": tol})
    return hi


@lru_cache(maxsize=32)
def _cached_rule(half_width: float, panels: int, order: int) -> QuadratureRule:
    return build_rule(half_width, panels, order)


def position_rule(
    settings: Settings | None = None,
    tol: float = DEFAULT_TOL_QUAD,
    max_exponent: int = 21,
) -> QuadratureRule:
    """Default position rule: L covers the basis densities up to x^(2·max_exponent) to tail mass ``tol``."""
    settings = settings or Settings()
    L = choose_half_width(quartic_tail(2 * max_exponent, 0.25), tol)
    L = max(settings.min_half_width, L)
    return _cached_rule(L, settings.panels, settings.order)
