from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class WellGeometry(BaseModel):
    minima_positions: tuple[float, float]
    minima_value: float
    barrier_value: float = 0.0
    barrier_height: float = 0.0
    is_double_well: bool


class MeasureReport(BaseModel):
    delta_x: float
    delta_p: float
    s_x: float
    s_p: float
    s_t: float
    heisenberg: float
    mean_x: float
    mean_p: float
    norm_x: float = 1.0
    norm_p: float = 1.0


class DivergenceReport(BaseModel):
    kl: float
    crj: float
    kl_direction: str
    near_singular: bool = False


class CriticalCoupling(BaseModel):
    n: int
    lambda_c: float
    bracket: tuple[float, float]
    residual: float
    mesh_energy: Optional[float] = None
    status: str = "ok"


class WkbResult(BaseModel):
    n: int
    lam: float
    epsilon_n: float
    energy: float
    turning_points: tuple[float, float]
    action: float
    splitting_estimate: float
    corrections: bool = False


class PairingReport(BaseModel):
    lam: float
    gap_01: float
    gap_23: float
    crj_01: float
    crj_23: float


class CheckResult(BaseModel):
    id: str
    label: str
    passed: bool
    detail: str = ""


class CurveFeatures(BaseModel):
    quantity: str
    n: int
    maxima: list[float] = Field(default_factory=list)
    minima: list[float] = Field(default_factory=list)


class ScanRow(BaseModel):
    """One (λ, n) record of a sweep; requested quantities ride along as extra fields."""

    model_config = ConfigDict(extra="allow")

    lam: float
    n: int
    status: str = "ok"
    note: str = ""
