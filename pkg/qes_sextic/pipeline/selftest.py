"""Invariant checks across the numerical modules.

The grid checks share one cached coupling sweep, so ``selftest`` pays for it once.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Callable

import numpy as np

from ..models.config import MeshConfig, ModelParams, Quantity, ScanSpec, Settings
from ..models.results import CheckResult
from ..modules import infotheory, qes_exact, reference, wkb
from ..modules.lagrange_mesh import default_config, default_scale, mesh_solve
from ..modules.momentum import momentum_sample, series_sample, transform_quadrature, uniform_grid
from ..modules.quadrature import position_rule
from ..modules.sampling import sample
from ..modules.variational import solve
from .scans import curve_features, find_critical, run_scan, verify_critical

logger = logging.getLogger(__name__)

Check = Callable[[Settings], tuple[bool, str]]

COMPARISON_COUPLINGS = (-0.75, -0.5, 0.0, 0.5, 0.7329531261, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 6.0)
MOMENTUM_COUPLINGS = (0.0, 1.0, 3.0, 6.0)
SWEEP = ScanSpec(
    lambda_min=-0.75,
    lambda_max=6.0,
    step=0.25,
    quantities=[
        Quantity.dx,
        Quantity.dp,
        Quantity.st,
        Quantity.heisenberg,
        Quantity.kl_pairs,
        Quantity.crj_pairs,
    ],
)
CRJ_PEAK_WINDOW = (2.8, 3.6)


@lru_cache(maxsize=4)
def _sweep_rows(settings_json: str) -> tuple[dict, ...]:
    return tuple(run_scan(SWEEP, Settings.model_validate_json(settings_json)))


def _sweep(settings: Settings) -> tuple[dict, ...]:
    return _sweep_rows(settings.model_dump_json())


def _exact_sector(settings: Settings) -> tuple[bool, str]:
    values = qes_exact.build_sector(1.0).eigenvalues
    expected = np.array([1.5 - math.sqrt(3.0), 1.5 + math.sqrt(3.0)])
    err = float(np.max(np.abs(values - expected)))
    return err < 1e-12, f"max error {err:.2e}"


def _variational_vs_exact(settings: Settings) -> tuple[bool, str]:
    worst = 0.0
    for lam in (0.0, 0.5, 1.0, 2.0, 3.0):
        sector = qes_exact.build_sector(lam)
        spectrum = solve(ModelParams(lam=lam), settings=settings)
        for which, exact in enumerate(sector.eigenvalues):
            n = sector.global_index(which)
            if n > 3:
                continue
            worst = max(worst, abs(spectrum.state(n).energy - exact) / max(abs(exact), 1.0))
    return worst < 1e-8, f"max relative delta {worst:.2e}"


def _reflection(settings: Settings) -> tuple[bool, str]:
    worst = max(qes_exact.reflection_defect(lam) for lam in (1.0, 2.0, 3.0, 6.0))
    return worst < 1e-10, f"max defect {worst:.2e}"


def _critical(settings: Settings) -> tuple[bool, str]:
    couplings = [verify_critical(find_critical(n, settings=settings), settings) for n in range(4)]
    values = [c.lambda_c for c in couplings]
    ok = (
        values == sorted(values)
        and abs(values[0] - 0.7329531) <= 1e-5
        and abs(values[2] - 3.2536) <= 1e-3
        and all(c.status == "ok" for c in couplings)
    )
    listed = ", ".join(f"{v:.7f}" for v in values)
    return ok, f"lambda_c = {listed}; statuses {[c.status for c in couplings]}"


def _mesh_agreement(settings: Settings) -> tuple[bool, str]:
    worst_low, worst_top = 0.0, 0.0
    for lam in COMPARISON_COUPLINGS:
        params = ModelParams(lam=lam)
        variational = solve(params, settings=settings)
        mesh = mesh_solve(params, default_config(params, settings), count=4)
        for n in range(4):
            e_v, e_m = variational.state(n).energy, mesh.state(n).energy
            delta = abs(e_v - e_m) / max(abs(e_m), 1.0)
            if n < 3:
                worst_low = max(worst_low, delta)
            else:
                worst_top = max(worst_top, delta)
    ok = worst_low < 1e-7 and worst_top < 1e-5
    return ok, f"max relative delta {worst_low:.2e} (n<3), {worst_top:.2e} (n=3)"


def _reference_rows(settings: Settings) -> tuple[bool, str]:
    rows = reference.load_rows()
    energies: dict[float, list[float]] = {}
    worst = -math.inf
    for row in rows:
        if row.lam not in energies:
            energies[row.lam] = solve(ModelParams(lam=row.lam), settings=settings).energies
        worst = max(worst, reference.reproduction_excess(row, energies[row.lam][row.n]))
    (ground,) = [row for row in rows if row.lam == 0.0 and row.n == 0]
    anchor = abs(ground.quotient() - 0.5)
    ok = worst < reference.REPRODUCTION_TOL and anchor < 1e-7
    return ok, f"{len(rows)} rows, max excess {worst:.2e}, lambda=0 quotient off by {anchor:.1e}"


def _bounds(settings: Settings) -> tuple[bool, str]:
    rows = _sweep(settings)
    failed = [row for row in rows if row["status"] != "ok"]
    if failed:
        return False, f"{len(failed)} sweep points failed"
    slack_h = min(row["heisenberg"] - 0.5 for row in rows)
    slack_s = min(row["st"] - infotheory.ENTROPIC_BOUND for row in rows)
    (steep,) = [row for row in rows if row["lam"] == -0.75 and row["n"] == 0]
    near = (
        abs(steep["heisenberg"] - 0.5) / 0.5 < 0.02
        and abs(steep["st"] - infotheory.ENTROPIC_BOUND) / infotheory.ENTROPIC_BOUND < 0.02
    )
    ok = slack_h >= -1e-9 and slack_s >= -1e-9 and near
    detail = f"min Heisenberg slack {slack_h:.3e}, min entropic slack {slack_s:.3e}"
    return ok, f"{detail}, lambda=-0.75 near bound {near}"


def _kl_decrease(settings: Settings) -> tuple[bool, str]:
    values = [row["kl_pair"] for row in _sweep(settings) if row["n"] == 0 and row["lam"] >= 0.0]
    rises = sum(b >= a for a, b in zip(values, values[1:]))
    return rises == 0 and len(values) > 1, f"{len(values)} points, {rises} non-decreasing steps"


def _crj_peak(settings: Settings) -> tuple[bool, str]:
    rows = [row for row in _sweep(settings) if row["n"] == 2 and row["lam"] >= 0.0]
    (features,) = curve_features(rows, "crj_pair")
    lo, hi = CRJ_PEAK_WINDOW
    ok = len(features.maxima) == 1 and lo <= features.maxima[0] <= hi
    return ok, f"interior maxima at {features.maxima}"


def _parseval(settings: Settings) -> tuple[bool, str]:
    worst = 0.0
    for lam in MOMENTUM_COUPLINGS:
        spectrum = solve(ModelParams(lam=lam), settings=settings)
        for n in range(4):
            worst = max(worst, abs(momentum_sample(spectrum.state(n), settings).norm - 1.0))
    return worst < 1e-9, f"max norm drift {worst:.2e}"


def _series_vs_quadrature(settings: Settings) -> tuple[bool, str]:
    p = uniform_grid(6.0, 0.5)
    spectrum = solve(ModelParams(lam=1.0), settings=settings)
    worst = 0.0
    for n in range(4):
        state = spectrum.state(n)
        series = series_sample(state, p, digits=settings.series_digits).amplitude
        quadrature = transform_quadrature(state, p).amplitude
        worst = max(worst, float(np.max(np.abs(series - quadrature))))
    return worst < 1e-9, f"max |series - quadrature| {worst:.2e}"


def _divergence_zero(settings: Settings) -> tuple[bool, str]:
    rule = position_rule(settings)
    state = solve(ModelParams(lam=0.0), settings=settings).state(0)
    rho = sample(state.amplitude, rule)
    kl = infotheory.kl_divergence(rho, rho)
    crj = infotheory.crj_divergence(rho, rho)
    return abs(kl) < 1e-12 and abs(crj) < 1e-12, f"kl {kl:.1e}, crj {crj:.1e}"


def _harmonic_limit(settings: Settings) -> tuple[bool, str]:
    params = ModelParams(lam=-100.0)
    energy = mesh_solve(params, default_config(params, settings), count=1).state(0).energy
    err = abs(energy - wkb.harmonic_limit(0, -100.0)) / energy
    return err < 0.03, f"relative error {err:.2e}"


def _deep_well(settings: Settings) -> tuple[bool, str]:
    lam, size = 100.0, 240
    config = MeshConfig(size=size, scale=default_scale(lam, size))
    energy = mesh_solve(ModelParams(lam=lam), config, count=1).state(0).energy
    semiclassical = wkb.quantize(0, lam, corrections=True).energy
    err = abs(semiclassical - energy) / abs(energy)
    ratio = energy / lam**1.5
    ok = err < 0.05 and wkb.U_MIN < ratio < 0.0
    return ok, f"wkb vs mesh {err:.2e}, E0/lambda^1.5 = {ratio:.5f}"


CHECKS: list[tuple[str, str, Check]] = [
    ("qes-sector", "exact sector eigenvalues at lambda=1", _exact_sector),
    ("qes-variational", "variational energies on exact sectors", _variational_vs_exact),
    ("reflection", "energy reflection against the partner sector", _reflection),
    ("critical", "critical couplings, ordered and mesh-confirmed", _critical),
    ("mesh", "variational vs Lagrange mesh on twelve couplings", _mesh_agreement),
    ("reference", "tabulated coefficients reproduce the energies", _reference_rows),
    ("bounds", "Heisenberg and entropic bounds over the coupling grid", _bounds),
    ("kl-decrease", "KL(rho1||rho0) decreases for lambda >= 0", _kl_decrease),
    ("crj-peak", "single CRJ(rho2, rho3) maximum in the mid range", _crj_peak),
    ("parseval", "momentum normalization for n <= 3", _parseval),
    ("series", "series vs quadrature momentum amplitudes at lambda=1", _series_vs_quadrature),
    ("divergence-zero", "KL and CRJ vanish on identical densities", _divergence_zero),
    ("harmonic", "harmonic limit at lambda=-100", _harmonic_limit),
    ("wkb", "semiclassical ground level at lambda=100", _deep_well),
]


def run_checks(settings: Settings | None = None) -> list[CheckResult]:
    settings = settings or Settings()
    results = []
    for check_id, label, check in CHECKS:
        try:
            passed, detail = check(settings)
        except Exception as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        if not passed:
            logger.warning("selftest check failed", extra={"check": check_id, "detail": detail})
        results.append(CheckResult(id=check_id, label=label, passed=bool(passed), detail=detail))
    return results
