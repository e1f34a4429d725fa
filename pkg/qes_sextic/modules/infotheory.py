"""Moments, Shannon entropies and divergences of position and momentum densities."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.special import entr, eval_hermite, gammaln, kl_div

from ..errors import GridMismatchError, NormalizationError
from ..models.config import Settings
from ..models.results import DivergenceReport, MeasureReport
from ..utils.summation import reverse_cumsum
from .momentum import momentum_sample
from .quadrature import QuadratureRule, position_rule
from .sampling import Grid, WaveSample, from_density, grid_arrays, sample

logger = logging.getLogger(__name__)

DENSITY_FLOOR = 1e-300
SURVIVAL_CUTOFF = 1e-15
NORM_WARN = 1e-9
NORM_FAIL = 1e-6

ENTROPIC_BOUND = 1.0 + math.log(math.pi)


def _clean(density: np.ndarray) -> np.ndarray:
    return np.where(density < DENSITY_FLOOR, 0.0, density)


def _check_norm(sample_: WaveSample, label: str) -> float:
    norm = sample_.norm
    drift = abs(norm - 1.0)
    if drift > NORM_FAIL:
        raise NormalizationError(f"{label} density integrates to {norm:.12g}")
    if drift > NORM_WARN:
        logger.warning("normalization drift", extra={"space": label, "drift": drift})
    return norm


def moments(sample_: WaveSample) -> tuple[float, float, float]:
    rho = _clean(sample_.density)
    mean = sample_.integrate(sample_.grid * rho)
    second = sample_.integrate(sample_.grid**2 * rho)
    width = math.sqrt(max(second - mean * mean, 0.0))
    entropy = sample_.integrate(entr(rho))
    return mean, width, entropy


def measure(position: WaveSample, momentum: WaveSample) -> MeasureReport:
    norm_x = _check_norm(position, "position")
    norm_p = _check_norm(momentum, "momentum")
    mean_x, delta_x, s_x = moments(position)
    mean_p, delta_p, s_p = moments(momentum)
    return MeasureReport(
        delta_x=delta_x,
        delta_p=delta_p,
        s_x=s_x,
        s_p=s_p,
        s_t=s_x + s_p,
        heisenberg=delta_x * delta_p,
        mean_x=mean_x,
        mean_p=mean_p,
        norm_x=norm_x,
        norm_p=norm_p,
    )


def position_sample(state, settings: Settings | None = None) -> WaveSample:
    return sample(state.amplitude, position_rule(settings), space="position")


def measure_state(state, settings: Settings | None = None) -> MeasureReport:
    settings = settings or Settings()
    return measure(position_sample(state, settings), momentum_sample(state, settings))


def _common_grid(a: WaveSample, b: WaveSample) -> None:
    if not a.same_grid(b):
        raise GridMismatchError("densities are tabulated on different grids")
    if a.weights is None:
        raise GridMismatchError("divergences need quadrature weights")


def _kl(a: WaveSample, b: WaveSample) -> tuple[float, bool]:
    _common_grid(a, b)
    rho_a = _clean(a.density)
    singular = (rho_a > 0) & (b.density < DENSITY_FLOOR)
    rho_b = np.maximum(b.density, DENSITY_FLOOR)
    # kl_div(a, b) = a ln(a/b) − a + b, pointwise ≥ 0; the extra terms integrate to zero
    return a.integrate(kl_div(rho_a, rho_b)), bool(np.any(singular))


def kl_divergence(a: WaveSample, b: WaveSample) -> float:
    """D(a‖b) = ∫ρ_a ln(ρ_a/ρ_b) in nats."""
    value, singular = _kl(a, b)
    if singular:
        logger.warning("kl uses the density floor", extra={"floor": DENSITY_FLOOR})
    return value


def survival(sample_: WaveSample) -> np.ndarray:
    """S(x_i) = ∫_{x_i}^∞ ρ, clamped to [1e-300, 1]."""
    mass = sample_.weights * sample_.density
    tail = reverse_cumsum(mass) - 0.5 * mass
    return np.clip(tail, DENSITY_FLOOR, 1.0)


def crj_divergence(a: WaveSample, b: WaveSample) -> float:
    """Symmetrized cumulative residual divergence ∫(S_a − S_b) ln(S_a/S_b)."""
    _common_grid(a, b)
    s_a = survival(a)
    s_b = survival(b)
    integrand = (s_a - s_b) * (np.log(s_a) - np.log(s_b))
    integrand = np.where((s_a < SURVIVAL_CUTOFF) & (s_b < SURVIVAL_CUTOFF), 0.0, integrand)
    return a.integrate(integrand)


def divergence_report(a: WaveSample, b: WaveSample, label_a: str = "a", label_b: str = "b") -> DivergenceReport:
    kl, singular = _kl(a, b)
    return DivergenceReport(
        kl=kl,
        crj=crj_divergence(a, b),
        kl_direction=f"KL({label_a}||{label_b})",
        near_singular=singular,
    )


def default_ho_omega(lam: float) -> float:
    return 2.0 * math.sqrt(abs(lam)) if lam < 0 else math.sqrt(2.0)


def ho_reference_density(n: int, omega: float, grid: Grid) -> WaveSample:
    """|ψ_n|² of the oscillator ½p² + ½ω²x²."""
    if n < 0:
        raise ValueError(f"oscillator level must be non-negative, got {n}")
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    log_norm = 0.25 * math.log(omega / math.pi) - 0.5 * (n * math.log(2.0) + float(gammaln(n + 1)))

    def amplitude(x: np.ndarray) -> np.ndarray:
        xi = math.sqrt(omega) * x
        return math.exp(log_norm) * eval_hermite(n, xi) * np.exp(-0.5 * xi * xi)

    return sample(amplitude, grid, space="position", method="harmonic")


def gaussian_sample(
    grid: QuadratureRule,
    mean: float = 0.0,
    sigma: float = math.sqrt(0.5),
    space: str = "position",
) -> WaveSample:
    nodes, _ = grid_arrays(grid)
    rho = np.exp(-0.5 * ((nodes - mean) / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
    return from_density(rho, grid, space=space, method="gaussian")
