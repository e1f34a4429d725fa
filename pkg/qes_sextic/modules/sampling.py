from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np
from numpy.typing import ArrayLike

from .quadrature import QuadratureRule

Grid = Union[QuadratureRule, ArrayLike]


@dataclass(frozen=True)
class WaveSample:
    """Amplitude and density tabulated on a grid, with quadrature weights when the grid is a rule."""

    grid: np.ndarray
    amplitude: np.ndarray
    density: np.ndarray
    weights: Optional[np.ndarray] = None
    space: str = "position"
    method: str = "direct"

    def integrate(self, values: ArrayLike) -> float:
        if self.weights is None:
            raise ValueError("sample has no quadrature weights")
        return float(np.real(np.dot(self.weights, np.asarray(values))))

    @property
    def norm(self) -> float:
        return self.integrate(self.density)

    def normalized(self) -> "WaveSample":
        norm = self.norm
        return replace(
            self,
            amplitude=self.amplitude / np.sqrt(norm),
            density=self.density / norm,
        )

    def same_grid(self, other: "WaveSample") -> bool:
        return self.grid.shape == other.grid.shape and bool(np.array_equal(self.grid, other.grid))


def grid_arrays(grid: Grid) -> tuple[np.ndarray, Optional[np.ndarray]]:
    if isinstance(grid, QuadratureRule):
        return grid.nodes, grid.weights
    return np.asarray(grid, dtype=float), None


def sample(
    amplitude: Callable[[np.ndarray], np.ndarray],
    grid: Grid,
    space: str = "position",
    method: str = "direct",
) -> WaveSample:
    nodes, weights = grid_arrays(grid)
    values = np.asarray(amplitude(nodes))
    return WaveSample(
        grid=nodes,
        amplitude=values,
        density=np.abs(values) ** 2,
        weights=weights,
        space=space,
        method=method,
    )


def from_density(
    density: ArrayLike,
    grid: Grid,
    space: str = "position",
    method: str = "direct",
) -> WaveSample:
    nodes, weights = grid_arrays(grid)
    rho = np.asarray(density, dtype=float)
    return WaveSample(
        grid=nodes,
        amplitude=np.sqrt(rho),
        density=rho,
        weights=weights,
        space=space,
        method=method,
    )
