from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial
from numpy.typing import ArrayLike

from ..errors import NumericalError, SectorError
from ..models.config import ParitySector, Settings
from .quadrature import QuadratureRule, position_rule
from .sampling import Grid, WaveSample, sample

logger = logging.getLogger(__name__)

REALITY_TOL = 1e-10


@dataclass(frozen=True)
class AlgebraicSector:
    """Exact sector of the reduced operator at lattice λ.

    ``matrix[:, j]`` holds the image of the j-th basis monomial x^{offset + 2j};
    ``polynomials[i]`` the coefficients of P for the i-th eigenvalue, lowest coefficient 1.
    """

    lam: float
    parity: ParitySector
    dimension: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    polynomials: np.ndarray
    reflected: bool = False

    @property
    def exponents(self) -> np.ndarray:
        return self.parity.offset + 2 * np.arange(self.dimension)

    def global_index(self, which: int) -> int:
        """The sector holds the lowest ``dimension`` states of its parity."""
        return 2 * which + self.parity.offset


@dataclass(frozen=True)
class ExactState:
    n: int
    parity: ParitySector
    energy: float
    polynomial: np.ndarray
    norm_constant: float
    lam: float

    def amplitude(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x2 = x * x
        poly = np.polynomial.polynomial.polyval(x2, self.polynomial)
        if self.parity is ParitySector.odd:
            poly = poly * x
        return self.norm_constant * poly * np.exp(-0.25 * x2 * x2 - 0.5 * x2)

    def density(self, x: ArrayLike) -> np.ndarray:
        return self.amplitude(x) ** 2


def admissible(lam: float) -> Optional[ParitySector]:
    """Parity sector opened at λ, or None off the lattice {0, 1/2, 1, 3/2, ...}."""
    if lam < 0:
        return None
    twice = 2.0 * lam
    if abs(twice - round(twice)) > 1e-12:
        return None
    return ParitySector.even if int(round(twice)) % 2 == 0 else ParitySector.odd


def reduced_operator(lam: float, reflected: bool = False):
    """ĥP = −½P″ + (x³ ± x)P′ + (±½ − 2λx²)P for the gauge e^{−x⁴/4 ∓ x²/2}."""
    sign = -1.0 if reflected else 1.0
    drift = Polynomial([0.0, sign, 0.0, 1.0])
    shift = Polynomial([0.5 * sign, 0.0, -2.0 * lam])

    def apply(p: Polynomial) -> Polynomial:
        return -0.5 * p.deriv(2) + drift * p.deriv(1) + shift * p

    return apply


def build_sector(lam: float, reflected: bool = False) -> AlgebraicSector:
    parity = admissible(lam)
    if parity is None:
        raise SectorError(f"lambda={lam} is not a non-negative integer or half-integer")
    size = int(round(lam - 0.5 * parity.offset)) + 1
    exponents = parity.offset + 2 * np.arange(size)
    apply = reduced_operator(lam, reflected)

    matrix = np.zeros((size, size))
    for j, m in enumerate(exponents):
        image = np.zeros(int(exponents[-1]) + 3)
        coef = apply(Polynomial.basis(int(m))).coef
        image[: coef.size] = coef
        leak = np.delete(image, exponents)
        if np.max(np.abs(leak), initial=0.0) > 1e-12:
            raise SectorError(f"span not closed under the reduced operator at lambda={lam}")
        matrix[:, j] = image[exponents]

    values, vectors = np.linalg.eig(matrix)
    scale = max(1.0, float(np.max(np.abs(values))))
    if np.max(np.abs(values.imag)) > REALITY_TOL * scale:
        raise NumericalError(f"complex sector eigenvalues at lambda={lam}")
    order = np.argsort(values.real)
    values = values.real[order]
    vectors = vectors.real[:, order]
    polynomials = (vectors / vectors[0, :]).T
    return AlgebraicSector(
        lam=lam,
        parity=parity,
        dimension=size,
        matrix=matrix,
        eigenvalues=values,
        polynomials=polynomials,
        reflected=reflected,
    )


def reflection_defect(lam: float) -> float:
    """max_i |E_i + Ē_{N−i}| between the sector and its quartic-flipped partner."""
    direct = build_sector(lam).eigenvalues
    partner = build_sector(lam, reflected=True).eigenvalues
    return float(np.max(np.abs(direct + partner[::-1])))


def reflection_spread(sector: AlgebraicSector) -> float:
    """max_i |E_i + E_{N−i} − (E_0 + E_N)| inside one sector."""
    e = sector.eigenvalues
    sums = e + e[::-1]
    return float(np.max(np.abs(sums - sums[0])))


def sector_state(
    sector: AlgebraicSector,
    which: int,
    rule: QuadratureRule | None = None,
) -> ExactState:
    if sector.reflected:
        raise SectorError("reflected sectors describe the partner potential")
    if not 0 <= which < sector.dimension:
        raise IndexError(f"sector index {which} outside 0..{sector.dimension - 1}")
    rule = rule or position_rule(Settings())
    raw = ExactState(
        n=sector.global_index(which),
        parity=sector.parity,
        energy=float(sector.eigenvalues[which]),
        polynomial=sector.polynomials[which],
        norm_constant=1.0,
        lam=sector.lam,
    )
    norm = rule.integrate(raw.density(rule.nodes))
    return ExactState(
        n=raw.n,
        parity=raw.parity,
        energy=raw.energy,
        polynomial=raw.polynomial,
        norm_constant=float(1.0 / np.sqrt(norm)),
        lam=raw.lam,
    )


def exact_density(sector: AlgebraicSector, which: int, grid: Grid) -> WaveSample:
    state = sector_state(sector, which)
    return sample(state.amplitude, grid, space="position", method="exact")
