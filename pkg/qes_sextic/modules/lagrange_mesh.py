from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike
from scipy.special import roots_hermite

from ..errors import MeshError
from ..models.config import MeshConfig, ModelParams, ParitySector, Settings
from .potential import evaluate, minimum_square
from .variational import SpectrumResult

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-14
MAX_NEWTON = 20
MAX_SIZE = 700


@dataclass(frozen=True)
class HermiteMesh:
    """Roots u_i of H_N with Lagrange-mesh weights λ_i = 1/(N h_{N−1}(u_i)²)."""

    size: int
    nodes: np.ndarray
    weights: np.ndarray
    signs: np.ndarray


def _top_pair(size: int, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalized Hermite functions h_N(u), h_{N−1}(u) by the stable recurrence."""
    prev = np.zeros_like(u)
    cur = np.pi**-0.25 * np.exp(-0.5 * u * u)
    for k in range(size):
        nxt = math.sqrt(2.0 / (k + 1)) * u * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
    return cur, prev


@lru_cache(maxsize=16)
def build_mesh(size: int) -> HermiteMesh:
    if not 1 <= size <= MAX_SIZE:
        raise ValueError(f"mesh size must lie in 1..{MAX_SIZE}, got {size}")
    u, _ = roots_hermite(size)
    u = np.array(u, dtype=float)
    for _ in range(MAX_NEWTON):
        h_n, h_prev = _top_pair(size, u)
        step = h_n / (math.sqrt(2.0 * size) * h_prev - u * h_n)
        u = u - step
        if np.all(np.abs(step) <= NEWTON_TOL * np.maximum(1.0, np.abs(u))):
            break
    else:
        raise MeshError(f"Hermite root polishing did not converge for N={size}")
    if not np.all(np.isfinite(u)) or np.any(np.diff(u) <= 0):
        raise MeshError(f"degenerate Hermite nodes for N={size}")
    _, h_prev = _top_pair(size, u)
    return HermiteMesh(
        size=size,
        nodes=u,
        weights=1.0 / (size * h_prev**2),
        signs=np.sign(h_prev),
    )


def kinetic_matrix(mesh: HermiteMesh) -> np.ndarray:
    """Matrix of −d²/du² on the mesh (Gauss approximation)."""
    u = mesh.nodes
    idx = np.arange(mesh.size)
    sign = np.where((idx[:, None] - idx[None, :]) % 2 == 0, 1.0, -1.0)
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, 1.0)
    t = sign * 2.0 / diff**2
    np.fill_diagonal(t, (2.0 * mesh.size + 1.0 - u * u) / 3.0)
    return t


def default_scale(lam: float, size: int) -> float:
    scale = 1.0 / (1.0 + abs(lam) ** 0.25)
    if lam > 10.0:
        reach = 1.6 * math.sqrt(minimum_square(lam)) / math.sqrt(2.0 * size)
        scale = max(scale, reach)
    return scale


def default_config(params: ModelParams, settings: Settings | None = None) -> MeshConfig:
    settings = settings or Settings()
    scale = settings.mesh_scale or default_scale(params.lam, settings.mesh_size)
    return MeshConfig(size=settings.mesh_size, scale=scale)


@dataclass(frozen=True)
class MeshState:
    n: int
    parity: ParitySector
    energy: float
    coefficients: np.ndarray
    mesh: HermiteMesh
    scale: float
    lam: float

    @property
    def mesh_points(self) -> np.ndarray:
        return self.scale * self.mesh.nodes

    @property
    def mesh_values(self) -> np.ndarray:
        return self.coefficients / np.sqrt(self.scale * self.mesh.weights)

    def amplitude(self, x: ArrayLike) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        u = x / self.scale
        h_n, _ = _top_pair(self.mesh.size, u)
        diff = u[:, None] - self.mesh.nodes[None, :]
        on_node = diff == 0.0
        diff[on_node] = 1.0
        series = (self.coefficients * self.mesh.signs / diff).sum(axis=1)
        psi = h_n / math.sqrt(2.0) * series / math.sqrt(self.scale)
        hit_rows, hit_cols = np.nonzero(on_node)
        psi[hit_rows] = self.mesh_values[hit_cols]
        return psi

    def density(self, x: ArrayLike) -> np.ndarray:
        return self.amplitude(x) ** 2


def _classify(coefficients: np.ndarray, nodes: np.ndarray) -> tuple[ParitySector, np.ndarray]:
    mirrored = coefficients[::-1]
    parity = (
        ParitySector.even
        if np.linalg.norm(coefficients - mirrored) < np.linalg.norm(coefficients + mirrored)
        else ParitySector.odd
    )
    first_positive = int(np.searchsorted(nodes, 0.0, side="right"))
    if coefficients[first_positive] < 0:
        coefficients = -coefficients
    return parity, coefficients


def mesh_solve(
    params: ModelParams,
    config: MeshConfig | None = None,
    count: int = 4,
    potential: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> SpectrumResult:
    config = config or default_config(params)
    if count < 1 or count > config.size / 4:
        raise ValueError(f"count={count} exceeds the accuracy guard size/4 for N={config.size}")
    mesh = build_mesh(config.size)
    x = config.scale * mesh.nodes
    v = potential(x) if potential is not None else evaluate(params, x)
    hamiltonian = kinetic_matrix(mesh) / (2.0 * config.scale**2) + np.diag(v)
    energies, vectors = scipy.linalg.eigh(hamiltonian, subset_by_index=[0, count - 1])

    states = []
    for n, (energy, vec) in enumerate(zip(energies, vectors.T)):
        parity, vec = _classify(vec, mesh.nodes)
        states.append(
            MeshState(
                n=n,
                parity=parity,
                energy=float(energy),
                coefficients=vec,
                mesh=mesh,
                scale=config.scale,
                lam=params.lam,
            )
        )
    logger.debug("mesh solved", extra={"lambda": params.lam, "size": config.size, "scale": config.scale})
    return SpectrumResult(
        params=params,
        states=states,
        basis_sizes=(config.size, config.size),
        solver="mesh",
    )


def convergence_scan(
    params: ModelParams,
    sizes: Iterable[int],
    scale: float | None = None,
    count: int = 4,
) -> list[dict]:
    sizes = list(sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    rows = []
    for size in sizes:
        config = MeshConfig(size=size, scale=scale or default_scale(params.lam, size))
        spectrum = mesh_solve(params, config, count=min(count, size // 4))
        row = {"size": size}
        row.update({f"e{state.n}": state.energy for state in spectrum.states})
        rows.append(row)
    return rows
