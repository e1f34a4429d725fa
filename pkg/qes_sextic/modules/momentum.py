from __future__ import annotations

import logging
import math
from typing import Sequence

import mpmath
import numpy as np

from ..errors import NodeDensityError, ParityError, SeriesCancellationError
from ..models.config import ParitySector, Settings
from .quadrature import QuadratureRule, build_rule, choose_half_width, position_rule, sampled_tail
from .sampling import Grid, WaveSample, grid_arrays, sample

logger = logging.getLogger(__name__)

MomentumSample = WaveSample

NODES_PER_PERIOD = 12
CHUNK = 256
TERM_CUTOFF = 1e-20
MAX_TERMS = 4000
DOUBLE_DIGITS = 15


def momentum_limit(rule: QuadratureRule) -> float:
    """Largest |p| for which every panel holds NODES_PER_PERIOD nodes per period 2π/|p|."""
    return rule.order * 2.0 * math.pi / (NODES_PER_PERIOD * rule.panel_width)


def required_panels(rule: QuadratureRule, p_abs: float) -> int:
    return int(math.ceil(NODES_PER_PERIOD * p_abs * 2.0 * rule.half_width / (2.0 * math.pi * rule.order)))


def transform_quadrature(
    state,
    grid: Grid,
    rule: QuadratureRule | None = None,
) -> MomentumSample:
    """φ(p) = (2π)^{−1/2} ∫ ψ(x) e^{−ipx} dx by position-space quadrature."""
    rule = rule or position_rule(Settings())
    p, weights = grid_arrays(grid)
    p_abs = float(np.max(np.abs(p), initial=0.0))
    if p_abs > momentum_limit(rule):
        panels = required_panels(rule, p_abs)
        raise NodeDensityError(
            f"|p|={p_abs:.4g} needs at least {panels} panels of order {rule.order} on L={rule.half_width:g}",
            required_panels=panels,
        )
    weighted = rule.weights * state.amplitude(rule.nodes)
    phi = np.empty(p.shape, dtype=complex)
    for start in range(0, p.size, CHUNK):
        chunk = p[start : start + CHUNK]
        phase = np.outer(chunk, rule.nodes)
        phi[start : start + CHUNK] = np.cos(phase) @ weighted - 1j * (np.sin(phase) @ weighted)
    phi /= math.sqrt(2.0 * math.pi)
    return MomentumSample(
        grid=p,
        amplitude=phi,
        density=np.abs(phi) ** 2,
        weights=weights,
        space="momentum",
        method="quadrature",
    )


class MomentSeries:
    """Maclaurin series of φ(p) for N·Σ c_j x^{m_j} e^{−x⁴/4}.

    φ(p) = (2π)^{−1/2} N Σ_k (−ip)^k / k! · a_k with a_k = Σ_j c_j ∫x^{m_j+k} e^{−x⁴/4} dx;
    only k of the state's parity contribute.
    """

    def __init__(
        self,
        coefficients: Sequence[float],
        parity: ParitySector = ParitySector.even,
        norm_constant: float = 1.0,
        digits: int = DOUBLE_DIGITS,
    ) -> None:
        self.parity = parity
        self.digits = digits
        self.norm_constant = norm_constant
        self._coefficients = [float(c) for c in coefficients]
        self._exponents = [parity.offset + 2 * j for j in range(len(self._coefficients))]
        self._moments: list = []

    @staticmethod
    def _quartic_moment(q: int):
        # ∫ x^q e^{−x⁴/4} dx = ½ 2^{(q+1)/2} Γ((q+1)/4)
        s = mpmath.mpf(q + 1)
        return mpmath.power(2, s / 2) * mpmath.gamma(s / 4) / 2

    def _moment(self, index: int):
        while len(self._moments) <= index:
            k = self.parity.offset + 2 * len(self._moments)
            self._moments.append(
                mpmath.fsum(
                    mpmath.mpf(c) * self._quartic_moment(m + k)
                    for c, m in zip(self._coefficients, self._exponents)
                )
            )
        return self._moments[index]

    def __call__(self, p: float) -> complex:
        with mpmath.workdps(self.digits):
            return self._evaluate(p)

    def _evaluate(self, p: float) -> complex:
        p = mpmath.mpf(p)
        k = self.parity.offset
        power = mpmath.power(p, k) / mpmath.factorial(k)
        k_min = 10 + 2 * int(abs(float(p)) ** (4.0 / 3.0))
        terms = []
        running_max = mpmath.mpf(0)
        index = 0
        while True:
            sign = -1 if (k // 2) % 2 else 1
            term = sign * power * self._moment(index)
            terms.append(term)
            running_max = max(running_max, abs(term))
            if k >= k_min and abs(term) <= TERM_CUTOFF * running_max:
                break
            if k > MAX_TERMS:
                raise SeriesCancellationError(f"series at p={float(p):g} did not settle", float("inf"))
            power = power * p * p / ((k + 1) * (k + 2))
            k += 2
            index += 1

        total = mpmath.fsum(terms)
        magnitude = mpmath.fsum(abs(t) for t in terms)
        if magnitude == 0:
            return 0j
        lost = float("inf") if total == 0 else float(mpmath.log10(magnitude / abs(total)))
        if lost > self.digits - 9:
            raise SeriesCancellationError(
                f"series at p={float(p):g} loses {lost:.1f} of {self.digits} digits",
                lost_digits=lost,
            )
        value = float(self.norm_constant * total / mpmath.sqrt(2 * mpmath.pi))
        # (−ip)^k: real with sign (−1)^{k/2} for even k, −i(−1)^{(k−1)/2} for odd k
        return complex(value, 0.0) if self.parity is ParitySector.even else complex(0.0, -value)


def transform_series(
    coefficients: Sequence[float],
    p: float,
    parity: ParitySector = ParitySector.even,
    norm_constant: float = 1.0,
    digits: int = DOUBLE_DIGITS,
) -> complex:
    return MomentSeries(coefficients, parity, norm_constant, digits)(p)


def series_sample(state, grid: Grid, digits: int = 40) -> MomentumSample:
    series = MomentSeries(state.coefficients, state.parity, state.norm_constant, digits)
    return sample(lambda p: np.array([series(v) for v in p]), grid, space="momentum", method="series")


def transform(state, grid: Grid, method: str = "quadrature", settings: Settings | None = None) -> MomentumSample:
    """Momentum sample by the requested method; refused series points fall back to quadrature."""
    settings = settings or Settings()
    rule = _rule_for(position_rule(settings), grid)
    if method == "quadrature" or not hasattr(state, "coefficients") or not hasattr(state, "norm_constant"):
        return transform_quadrature(state, grid, rule)
    if method != "series":
        raise ValueError(f"unknown transform method {method!r}")
    series = MomentSeries(state.coefficients, state.parity, state.norm_constant, settings.series_digits)
    p, weights = grid_arrays(grid)
    phi = np.empty(p.shape, dtype=complex)
    for i, value in enumerate(p):
        try:
            phi[i] = series(value)
        except SeriesCancellationError as exc:
            logger.warning("series refused, using quadrature", extra={"p": float(value), "lost": exc.lost_digits})
            phi[i] = transform_quadrature(state, np.array([value]), rule).amplitude[0]
    return MomentumSample(
        grid=p, amplitude=phi, density=np.abs(phi) ** 2, weights=weights, space="momentum", method="series"
    )


def _rule_for(rule: QuadratureRule, grid: Grid) -> QuadratureRule:
    p, _ = grid_arrays(grid)
    p_abs = float(np.max(np.abs(p), initial=0.0))
    if p_abs <= momentum_limit(rule):
        return rule
    return build_rule(rule.half_width, required_panels(rule, p_abs), rule.order)


def momentum_rule(state, settings: Settings | None = None) -> QuadratureRule:
    """Gauss–Legendre rule on [−p_max, p_max], p_max from the tail mass of |φ|²."""
    settings = settings or Settings()
    base = position_rule(settings)

    def density(p: np.ndarray) -> np.ndarray:
        return transform_quadrature(state, p, _rule_for(base, p)).density

    p_max = choose_half_width(sampled_tail(density), settings.momentum_tail, start=4.0)
    return build_rule(p_max, settings.momentum_panels, settings.order)


def momentum_sample(state, settings: Settings | None = None) -> MomentumSample:
    settings = settings or Settings()
    rule = momentum_rule(state, settings)
    return transform_quadrature(state, rule, _rule_for(position_rule(settings), rule))


def uniform_grid(p_max: float, spacing: float = 0.01) -> np.ndarray:
    count = int(round(p_max / spacing))
    return spacing * np.arange(-count, count + 1)


def _left_sign(plus: np.ndarray, minus: np.ndarray, nodes: np.ndarray, weights) -> float:
    """Sign s with (ψ₊ + sψ₋)/√2 carrying the larger mass on x < 0."""
    left = nodes < 0
    w = weights if weights is not None else np.ones_like(nodes)
    minus_first = np.dot(w[left], (plus[left] - minus[left]) ** 2)
    plus_first = np.dot(w[left], (plus[left] + minus[left]) ** 2)
    return -1.0 if minus_first >= plus_first else 1.0


def _check_pair(state_plus, state_minus) -> None:
    if state_plus.parity is not ParitySector.even or state_minus.parity is not ParitySector.odd:
        raise ParityError("localized pair needs an even state followed by an odd state")
    if state_minus.n != state_plus.n + 1:
        raise ParityError(f"states {state_plus.n} and {state_minus.n} are not consecutive")


def localized_pair(state_plus, state_minus, grid: Grid) -> tuple[WaveSample, WaveSample]:
    """ψ_L, ψ_R = (ψ_n ± ψ_{n+1})/√2, labelled by where the mass sits."""
    _check_pair(state_plus, state_minus)
    nodes, weights = grid_arrays(grid)
    plus = np.asarray(state_plus.amplitude(nodes))
    minus = np.asarray(state_minus.amplitude(nodes))
    sign = _left_sign(plus, minus, nodes, weights)
    left = (plus + sign * minus) / math.sqrt(2.0)
    right = (plus - sign * minus) / math.sqrt(2.0)
    return (
        WaveSample(grid=nodes, amplitude=left, density=left**2, weights=weights, method="localized"),
        WaveSample(grid=nodes, amplitude=right, density=right**2, weights=weights, method="localized"),
    )


def localized_momentum(
    state_plus,
    state_minus,
    grid: Grid,
    settings: Settings | None = None,
) -> tuple[MomentumSample, MomentumSample]:
    """φ_L, φ_R with the same combination signs as ``localized_pair``."""
    _check_pair(state_plus, state_minus)
    settings = settings or Settings()
    rule = position_rule(settings)
    sign = _left_sign(
        np.asarray(state_plus.amplitude(rule.nodes)),
        np.asarray(state_minus.amplitude(rule.nodes)),
        rule.nodes,
        rule.weights,
    )
    phi_plus = transform(state_plus, grid, settings=settings)
    phi_minus = transform(state_minus, grid, settings=settings)
    samples = []
    for amplitude in (
        (phi_plus.amplitude + sign * phi_minus.amplitude) / math.sqrt(2.0),
        (phi_plus.amplitude - sign * phi_minus.amplitude) / math.sqrt(2.0),
    ):
        samples.append(
            MomentumSample(
                grid=phi_plus.grid,
                amplitude=amplitude,
                density=np.abs(amplitude) ** 2,
                weights=phi_plus.weights,
                space="momentum",
                method="localized",
            )
        )
    return samples[0], samples[1]


def left_mass(sample_: WaveSample) -> float:
    mask = sample_.grid < 0
    return float(np.dot(sample_.weights[mask], sample_.density[mask]))
