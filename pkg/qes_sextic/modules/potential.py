from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike

from ..models.config import ModelParams
from ..models.results import WellGeometry


def _as_output(values: np.ndarray):
    return float(values) if values.ndim == 0 else values


def evaluate(params: ModelParams, x: ArrayLike):
    """V(x) = ½(x⁶ + 2x⁴ − 2(2λ+1)x²), built from x² only so parity is exact."""
    x2 = np.square(np.asarray(x, dtype=float))
    return _as_output(0.5 * x2 * (x2 * (x2 + 2.0) - 2.0 * (2.0 * params.lam + 1.0)))


def derivative(params: ModelParams, x: ArrayLike):
    x = np.asarray(x, dtype=float)
    x2 = np.square(x)
    return _as_output(x * (3.0 * x2 * x2 + 4.0 * x2 - 2.0 * (2.0 * params.lam + 1.0)))


def minimum_square(lam: float) -> float:
    """Positive root x₊² of 3x⁴ + 4x² − 2(2λ+1) = 0, or 0 when the well is single."""
    c = 2.0 * lam + 1.0
    if c <= 0.0:
        return 0.0
    # rationalized form of (−4 + √(16 + 24c))/6, stable as c → 0
    return 4.0 * c / (4.0 + math.sqrt(16.0 + 24.0 * c))


def geometry(params: ModelParams) -> WellGeometry:
    x2 = minimum_square(params.lam)
    if x2 <= 0.0:
        return WellGeometry(
            minima_positions=(0.0, 0.0),
            minima_value=0.0,
            barrier_height=0.0,
            is_double_well=False,
        )
    xp = math.sqrt(x2)
    vmin = evaluate(params, xp)
    return WellGeometry(
        minima_positions=(-xp, xp),
        minima_value=vmin,
        barrier_height=-vmin,
        is_double_well=True,
    )


def position_asymptote(lam: float) -> float:
    return math.sqrt(2.0) * (lam / 3.0) ** 0.25


def minimum_asymptote(lam: float) -> float:
    return 4.0 / 9.0 * lam * (3.0 - 2.0 * math.sqrt(3.0 * lam))
