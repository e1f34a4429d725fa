"""Tabulated eigenvector coefficients for the trial basis x^m·exp(−x⁴/4).

Rows carry the coefficients after the leading 1. A row is ``suspect`` when its
quotient misses the computed energy by more than ``REPRODUCTION_TOL``; the
``reason`` column says how.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..models.config import ModelParams, ParitySector
from .variational import rayleigh_quotient

TABLE = "data/reference_coefficients.csv"
REPRODUCTION_TOL = 1e-6
# relative excess is measured against max(|E|, ENERGY_FLOOR) so rows near E = 0 stay meaningful
ENERGY_FLOOR = 0.3


@dataclass(frozen=True)
class ReferenceRow:
    lam: float
    n: int
    parity: ParitySector
    status: str
    coefficients: tuple[float, ...]
    reason: str = ""

    @property
    def suspect(self) -> bool:
        return self.status != "ok"

    def full_coefficients(self) -> list[float]:
        return [1.0, *self.coefficients]

    def quotient(self) -> float:
        return rayleigh_quotient(ModelParams(lam=self.lam), self.parity, self.full_coefficients())


@lru_cache(maxsize=1)
def _all_rows() -> tuple[ReferenceRow, ...]:
    text = resources.files("qes_sextic").joinpath(TABLE).read_text("utf-8")
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        rows.append(
            ReferenceRow(
                lam=float(raw["lam"]),
                n=int(raw["n"]),
                parity=ParitySector(raw["parity"]),
                status=raw["status"],
                coefficients=tuple(float(c) for c in raw["coefficients"].split(";")),
                reason=raw.get("reason") or "",
            )
        )
    return tuple(rows)


def load_rows(include_suspect: bool = False) -> list[ReferenceRow]:
    return [row for row in _all_rows() if include_suspect or not row.suspect]


def reproduction_excess(row: ReferenceRow, energy: float) -> float:
    """(Q − E) / max(|E|, ENERGY_FLOOR); Q ≥ E up to rounding for a trial vector."""
    return (row.quotient() - energy) / max(abs(energy), ENERGY_FLOOR)
