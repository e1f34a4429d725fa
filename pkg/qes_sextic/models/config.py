from __future__ import annotations

import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ParitySector(str, Enum):
    even = "even"
    odd = "odd"

    @property
    def offset(self) -> int:
        """Lowest monomial power of the sector (x^0 or x^1)."""
        return 0 if self is ParitySector.even else 1


class SolverKind(str, Enum):
    variational = "variational"
    mesh = "mesh"


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


class Quantity(str, Enum):
    energy = "energy"
    dx = "dx"
    dp = "dp"
    sx = "sx"
    sp = "sp"
    st = "st"
    heisenberg = "heisenberg"
    kl_pairs = "kl_pairs"
    crj_pairs = "crj_pairs"
    crj_ho = "crj_ho"


MOMENTUM_QUANTITIES = frozenset({Quantity.dp, Quantity.sp, Quantity.st, Quantity.heisenberg})

DEFAULT_TOL_ENERGY = 1e-6
DEFAULT_TOL_QUAD = 1e-16


class ModelParams(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    tol_energy: float = DEFAULT_TOL_ENERGY
    tol_quad: float = DEFAULT_TOL_QUAD

    @field_validator("lam")
    @classmethod
    def _finite_coupling(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("lambda must be finite")
        return value

    @field_validator("tol_energy", "tol_quad")
    @classmethod
    def _positive_tolerance(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerances must be positive")
        return value


class Settings(BaseModel):
    """Numerical defaults shared by the solvers and the sweeps."""

    k_even: int = 10
    k_odd: int = 10
    min_basis: int = 4
    condition_limit: float = 1e12
    max_states: int = 6
    panels: int = 128
    order: int = 16
    min_half_width: float = 6.0
    mesh_size: int = 80
    mesh_scale: Optional[float] = None
    momentum_tail: float = 1e-12
    momentum_panels: int = 64
    series_digits: int = 40
    workers: int = 1


class MeshConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    size: int
    scale: float

    @field_validator("size")
    @classmethod
    def _positive_size(cls, value: int) -> int:
        if value < 1:
            raise ValueError("mesh size must be positive")
        return value

    @field_validator("scale")
    @classmethod
    def _positive_scale(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("mesh scale must be positive")
        return value


class ScanSpec(BaseModel):
    lambda_min: float
    lambda_max: float
    step: float
    states: list[int] = Field(default_factory=lambda: [0, 1, 2, 3])
    quantities: list[Quantity] = Field(default_factory=lambda: [Quantity.energy])
    solver: SolverKind = SolverKind.variational
    ho_omega: Optional[float] = None

    @model_validator(mode="after")
    def _check_range(self) -> "ScanSpec":
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.lambda_min < self.lambda_max:
            raise ValueError("lambda_min must be below lambda_max")
        if any(n < 0 for n in self.states):
            raise ValueError("state indices must be non-negative")
        return self

    def grid(self) -> list[float]:
        count = int(math.floor((self.lambda_max - self.lambda_min) / self.step + 1e-9)) + 1
        return [round(self.lambda_min + i * self.step, 12) for i in range(count)]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: str
    lam: Optional[float] = None
    lambda_range: Optional[tuple[float, float, float]] = None
    states: list[int] = Field(default_factory=lambda: [0, 1, 2, 3])
    k_even: int = 10
    k_odd: int = 10
    mesh_size: int = 80
    mesh_scale: Optional[float] = None
    ho_omega: Optional[float] = None
    quantities: list[Quantity] = Field(default_factory=lambda: [Quantity.energy])
    solver: SolverKind = SolverKind.variational
    n: int = 0
    corrections: bool = False
    bracket: Optional[tuple[float, float]] = None
    tol_energy: float = DEFAULT_TOL_ENERGY
    tol_quad: float = DEFAULT_TOL_QUAD
    format: OutputFormat = OutputFormat.csv
    out: Optional[str] = None

    def params(self) -> ModelParams:
        if self.lam is None:
            raise ValueError("--lambda is required")
        return ModelParams(lam=self.lam, tol_energy=self.tol_energy, tol_quad=self.tol_quad)

    def settings(self) -> Settings:
        return Settings(
            k_even=self.k_even,
            k_odd=self.k_odd,
            mesh_size=self.mesh_size,
            mesh_scale=self.mesh_scale,
        )

    def scan_spec(self) -> ScanSpec:
        if self.lambda_range is None:
            raise ValueError("--lambda-range is required")
        lo, hi, step = self.lambda_range
        return ScanSpec(
            lambda_min=lo,
            lambda_max=hi,
            step=step,
            states=self.states,
            quantities=self.quantities,
            solver=self.solver,
            ho_omega=self.ho_omega,
        )
