"""Semiclassical companion for |λ| → ∞.

For large positive λ the substitution x = λ^{1/4} y, E = λ^{3/2} ε turns V into
λ^{3/2} U(y) with U(y) = ½(y⁶ − 4y²) plus terms that vanish as λ grows, and the
kinetic term into one with effective Planck constant λ^{−1}. States of the right
well are quantized with ∫√(2(ε − U)) dy = (n + ½)π ħ_eff.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq
from scipy.special import roots_legendre

from ..errors import NotTrappedError
from ..models.results import WkbResult

logger = logging.getLogger(__name__)

U_MIN = -8.0 / (3.0 * math.sqrt(3.0))
MIN_LAMBDA = 10.0
GAUSS_ORDER = 96


def rescaled_potential(y: ArrayLike, lam: float | None = None):
    """U(y) = ½(y⁶ − 4y²); with ``lam`` the subleading λ^{−1/2}, λ^{−1} terms are kept."""
    y = np.asarray(y, dtype=float)
    alpha, beta = _cubic_terms(lam)
    s = y * y
    value = 0.5 * s * (s * s + alpha * s + beta)
    return float(value) if value.ndim == 0 else value


def _cubic_terms(lam: float | None) -> tuple[float, float]:
    # 2U = s³ + αs² + βs in s = y²
    if lam is None:
        return 0.0, -4.0
    return 2.0 / math.sqrt(lam), -(4.0 + 2.0 / lam)


def well_bottom(lam: float | None = None) -> float:
    alpha, beta = _cubic_terms(lam)
    s = (-alpha + math.sqrt(alpha * alpha - 3.0 * beta)) / 3.0
    return 0.5 * s * (s * s + alpha * s + beta)


def hbar_eff(lam: float, hbar_exponent: float = 1.0) -> float:
    return lam ** (-hbar_exponent)


def _cubic_roots(epsilon: float, alpha: float, beta: float) -> np.ndarray:
    """Real roots of s³ + αs² + βs − 2ε = 0, ascending, for ε in the trapped band."""
    shift = alpha / 3.0
    p = beta - alpha * alpha / 3.0
    q = 2.0 * alpha**3 / 27.0 - alpha * beta / 3.0 - 2.0 * epsilon
    radius = 2.0 * math.sqrt(-p / 3.0)
    arg = float(np.clip(3.0 * q / (p * radius), -1.0, 1.0))
    phi = math.acos(arg) / 3.0
    roots = np.sort(radius * np.cos(phi - 2.0 * math.pi * np.arange(3) / 3.0) - shift)
    # one Newton step per root
    f = roots**3 + alpha * roots**2 + beta * roots - 2.0 * epsilon
    df = 3.0 * roots**2 + 2.0 * alpha * roots + beta
    safe = np.abs(df) > 1e-12
    roots[safe] -= f[safe] / df[safe]
    return roots


def _check_band(epsilon: float, lam: float | None) -> None:
    bottom = well_bottom(lam)
    if not bottom <= epsilon < 0.0:
        raise ValueError(f"epsilon={epsilon} outside the trapped band ({bottom:.6f}, 0)")


def turning_points(epsilon: float, lam: float | None = None) -> tuple[float, float]:
    """Inner and outer turning points y₁ < y₂ of the right well."""
    _check_band(epsilon, lam)
    alpha, beta = _cubic_terms(lam)
    roots = _cubic_roots(epsilon, alpha, beta)
    inner, outer = max(roots[1], 0.0), max(roots[2], 0.0)
    return math.sqrt(inner), math.sqrt(outer)


@lru_cache(maxsize=4)
def _gauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = roots_legendre(order)
    return 0.5 * math.pi * t, 0.5 * math.pi * w


def _factored(s: np.ndarray, roots: np.ndarray) -> np.ndarray:
    # 2(U − ε) = (s − s₀)(s − s₁)(s − s₂)
    return (s - roots[0]) * (s - roots[1]) * (s - roots[2])


def well_action(epsilon: float, lam: float | None = None) -> float:
    """∫_{y₁}^{y₂} √(2(ε − U)) dy with y = mid + half·sin θ."""
    _check_band(epsilon, lam)
    alpha, beta = _cubic_terms(lam)
    roots = _cubic_roots(epsilon, alpha, beta)
    y1, y2 = math.sqrt(max(roots[1], 0.0)), math.sqrt(max(roots[2], 0.0))
    theta, w = _gauss(GAUSS_ORDER)
    mid, half = 0.5 * (y1 + y2), 0.5 * (y2 - y1)
    y = mid + half * np.sin(theta)
    kinetic = np.clip(-_factored(y * y, roots), 0.0, None)
    return float(half * np.dot(w, np.sqrt(kinetic) * np.cos(theta)))


def barrier_action(epsilon: float, lam: float | None = None) -> float:
    """∫_{−y₁}^{y₁} √(2(U − ε)) dy across the central barrier."""
    _check_band(epsilon, lam)
    alpha, beta = _cubic_terms(lam)
    roots = _cubic_roots(epsilon, alpha, beta)
    y1 = math.sqrt(max(roots[1], 0.0))
    theta, w = _gauss(GAUSS_ORDER)
    y = y1 * np.sin(theta)
    deficit = np.clip(_factored(y * y, roots), 0.0, None)
    return float(y1 * np.dot(w, np.sqrt(deficit) * np.cos(theta)))


def splitting(epsilon: float, lam: float = 1.0, hbar_exponent: float = 1.0) -> tuple[float, float]:
    """Barrier action S and the estimate exp(−S/ħ_eff); ħ_eff = 1 at lam = 1."""
    action = barrier_action(epsilon)
    return action, math.exp(-action / hbar_eff(lam, hbar_exponent))


def trapped_cutoff(lam: float, hbar_exponent: float = 1.0) -> int:
    """Largest n whose leading-order level lies below the barrier top, −1 if none."""
    return math.ceil(0.5 / hbar_eff(lam, hbar_exponent) - 0.5) - 1


def quantize(
    n: int,
    lam: float,
    corrections: bool = False,
    hbar_exponent: float = 1.0,
    min_lambda: float = MIN_LAMBDA,
) -> WkbResult:
    if n < 0:
        raise ValueError(f"state index must be non-negative, got {n}")
    if lam < min_lambda:
        raise ValueError(f"semiclassical quantization needs lambda >= {min_lambda}, got {lam}")
    shape = lam if corrections else None
    target = (n + 0.5) * math.pi * hbar_eff(lam, hbar_exponent)
    bottom = well_bottom(shape)
    top = -1e-14
    if well_action(top, shape) <= target:
        raise NotTrappedError(f"level n={n} is not trapped below the barrier at lambda={lam}")

    epsilon = brentq(lambda e: well_action(e, shape) - target, bottom, top, xtol=1e-15, rtol=1e-14)
    action = barrier_action(epsilon, shape)
    logger.debug("wkb level", extra={"lambda": lam, "n": n, "epsilon": epsilon})
    return WkbResult(
        n=n,
        lam=lam,
        epsilon_n=epsilon,
        energy=lam**1.5 * epsilon,
        turning_points=turning_points(epsilon, shape),
        action=action,
        splitting_estimate=math.exp(-action / hbar_eff(lam, hbar_exponent)),
        corrections=corrections,
    )


def harmonic_limit(n: int, lam: float) -> float:
    """E_n ≈ √|λ|(1 + 2n) for the steep single well at λ → −∞."""
    if lam >= 0:
        raise ValueError(f"harmonic limit needs lambda < 0, got {lam}")
    if n < 0:
        raise ValueError(f"state index must be non-negative, got {n}")
    return math.sqrt(-lam) * (1 + 2 * n)
