from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from ..errors import ConditioningError
from ..models.config import ModelParams, ParitySector, Settings
from .quadrature import weight_moment
from .sampling import Grid, WaveSample, sample

logger = logging.getLogger(__name__)

# convergence is judged on the two lowest doublets
CONVERGENCE_STATES = 4


@dataclass(frozen=True)
class EigenState:
    """Variational state N·Σ c_j x^{m_j} e^{−x⁴/4} with c_0 = 1."""

    n: int
    parity: ParitySector
    energy: float
    coefficients: np.ndarray
    norm_constant: float
    lam: float

    @property
    def exponents(self) -> np.ndarray:
        return sector_exponents(self.parity, len(self.coefficients) - 1)

    def amplitude(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x2 = x * x
        poly = np.polynomial.polynomial.polyval(x2, self.coefficients)
        if self.parity is ParitySector.odd:
            poly = poly * x
        return self.norm_constant * poly * np.exp(-0.25 * x2 * x2)

    def density(self, x: ArrayLike) -> np.ndarray:
        return self.amplitude(x) ** 2


@dataclass(frozen=True)
class SpectrumResult:
    params: ModelParams
    states: list
    basis_sizes: tuple[int, int]
    solver: str = "variational"
    truncation_delta: float = 0.0

    @property
    def converged(self) -> bool:
        """States n < CONVERGENCE_STATES moved by at most tol_energy (relative, floor 1)
        when one basis function was dropped.
        """
        return self.truncation_delta <= self.params.tol_energy

    @property
    def energies(self) -> list[float]:
        return [state.energy for state in self.states]

    def state(self, n: int):
        for state in self.states:
            if state.n == n:
                return state
        raise IndexError(f"state n={n} not in spectrum (have {len(self.states)})")


def sector_exponents(sector: ParitySector, k: int) -> np.ndarray:
    return sector.offset + 2 * np.arange(k + 1)


def _moment_table(max_q: int) -> np.ndarray:
    return np.array([weight_moment(q, 0.25) for q in range(0, max_q + 1, 2)])


def _matrices(params: ModelParams, sector: ParitySector, k: int) -> tuple[np.ndarray, np.ndarray]:
    m = sector_exponents(sector, k)
    s = m[:, None] + m[None, :]
    table = _moment_table(int(s.max()) + 4)

    def moment(q: np.ndarray) -> np.ndarray:
        return table[np.clip(q, 0, None) // 2]

    overlap = moment(s)
    # H_ij = ½ m_i m_j M(s−2) + (½ − 2λ) M(s+2) + M(s+4), from the symmetric kinetic form
    # ½∫ψ_i′ψ_j′ reduced with M(q+4) = (q+1)/2 · M(q)
    lower = np.where(s >= 2, moment(s - 2), 0.0)
    hamiltonian = (
        0.5 * np.outer(m, m) * lower
        + (0.5 - 2.0 * params.lam) * moment(s + 2)
        + moment(s + 4)
    )
    hamiltonian = 0.5 * (hamiltonian + hamiltonian.T)
    return hamiltonian, overlap


def _equilibrate(matrix: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return matrix * np.outer(scale, scale)


def overlap_condition(overlap: np.ndarray) -> float:
    """2-norm condition number of the unit-diagonal (equilibrated) overlap."""
    scale = 1.0 / np.sqrt(np.diag(overlap))
    return float(np.linalg.cond(_equilibrate(overlap, scale)))


def hamiltonian_and_overlap(
    params: ModelParams,
    sector: ParitySector,
    k: int,
    condition_limit: float = 1e12,
) -> tuple[np.ndarray, np.ndarray]:
    if k < 1:
        raise ValueError(f"basis size must be at least 1, got {k}")
    hamiltonian, overlap = _matrices(params, sector, k)
    cond = overlap_condition(overlap)
    if cond > condition_limit:
        raise ConditioningError(
            f"overlap condition number {cond:.3e} exceeds {condition_limit:.1e} "
            f"({sector.value} sector, k={k})"
        )
    return hamiltonian, overlap


def _ritz(hamiltonian: np.ndarray, overlap: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scale = 1.0 / np.sqrt(np.diag(overlap))
    energies, vectors = scipy.linalg.eigh(
        _equilibrate(hamiltonian, scale),
        _equilibrate(overlap, scale),
        driver="gvd",
    )
    return energies, vectors * scale[:, None]


def _truncation_delta(
    params: ModelParams,
    sector: ParitySector,
    k: int,
    states: list[EigenState],
    kept: list[EigenState],
) -> float:
    """Largest relative shift of the kept states of one sector between basis sizes k and k − 1."""
    if k < 2:
        return 0.0
    coarse, _ = _ritz(*_matrices(params, sector, k - 1))
    worst = 0.0
    for index, state in enumerate(states[: len(coarse)]):
        if any(state is other for other in kept):
            worst = max(worst, abs(state.energy - coarse[index]) / max(abs(state.energy), 1.0))
    return worst


def _sector_states(
    params: ModelParams,
    sector: ParitySector,
    k: int,
    settings: Settings,
) -> tuple[list[EigenState], int]:
    requested = k
    while True:
        try:
            hamiltonian, overlap = hamiltonian_and_overlap(
                params, sector, k, settings.condition_limit
            )
            break
        except ConditioningError:
            if k - 1 < settings.min_basis:
                raise
            logger.warning(
                "basis reduced after conditioning failure",
                extra={"lambda": params.lam, "sector": sector.value, "k": k - 1},
            )
            k -= 1
    if k != requested:
        logger.warning(
            "solving with reduced basis",
            extra={"lambda": params.lam, "sector": sector.value, "requested": requested, "k": k},
        )

    energies, vectors = _ritz(hamiltonian, overlap)

    states = []
    for energy, vec in zip(energies, vectors.T):
        if vec[0] == 0.0:
            raise ConditioningError(f"vanishing leading coefficient ({sector.value}, E={energy:.6g})")
        coeffs = vec / vec[0]
        norm = 1.0 / np.sqrt(coeffs @ overlap @ coeffs)
        states.append(
            EigenState(
                n=-1,
                parity=sector,
                energy=float(energy),
                coefficients=coeffs,
                norm_constant=float(norm),
                lam=params.lam,
            )
        )
    return states, k


def solve(
    params: ModelParams,
    k_even: int | None = None,
    k_odd: int | None = None,
    settings: Settings | None = None,
) -> SpectrumResult:
    settings = settings or Settings()
    k_even = settings.k_even if k_even is None else k_even
    k_odd = settings.k_odd if k_odd is None else k_odd
    if min(k_even, k_odd) < 1:
        raise ValueError("basis sizes must be positive")

    even, used_even = _sector_states(params, ParitySector.even, k_even, settings)
    odd, used_odd = _sector_states(params, ParitySector.odd, k_odd, settings)
    merged = sorted(even + odd, key=lambda state: state.energy)[: settings.max_states]
    checked = merged[:CONVERGENCE_STATES]
    delta = max(
        _truncation_delta(params, ParitySector.even, used_even, even, checked),
        _truncation_delta(params, ParitySector.odd, used_odd, odd, checked),
    )
    if delta > params.tol_energy:
        logger.warning(
            "variational energies not converged in basis size",
            extra={"lambda": params.lam, "delta": delta, "tol_energy": params.tol_energy},
        )
    states = [replace(state, n=index) for index, state in enumerate(merged)]
    return SpectrumResult(
        params=params,
        states=states,
        basis_sizes=(used_even, used_odd),
        truncation_delta=delta,
    )


def sector_spectrum(
    params: ModelParams,
    sector: ParitySector,
    k: int,
    settings: Settings | None = None,
) -> list[EigenState]:
    """All Ritz states of one parity sector, energy ascending, without global numbering."""
    states, _ = _sector_states(params, sector, k, settings or Settings())
    return states


def rayleigh_quotient(
    params: ModelParams,
    sector: ParitySector,
    coefficients: Sequence[float],
) -> float:
    coeffs = np.asarray(coefficients, dtype=float)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ValueError("coefficients must be a non-empty vector")
    if not np.any(coeffs):
        raise ValueError("zero coefficient vector")
    hamiltonian, overlap = _matrices(params, sector, coeffs.size - 1)
    return float((coeffs @ hamiltonian @ coeffs) / (coeffs @ overlap @ coeffs))


def expectation_x2(state: EigenState) -> float:
    k = len(state.coefficients) - 1
    m = sector_exponents(state.parity, k)
    s = m[:, None] + m[None, :] + 2
    table = _moment_table(int(s.max()))
    c = state.coefficients
    return float(state.norm_constant**2 * (c @ table[s // 2] @ c))


def hellmann_feynman_slope(state: EigenState) -> float:
    """dE/dλ = ⟨∂V/∂λ⟩ = −2⟨x²⟩."""
    return -2.0 * expectation_x2(state)


def evaluate_wavefunction(state: Union[EigenState, object], grid: Grid) -> WaveSample:
    return sample(state.amplitude, grid, space="position", method="variational")
