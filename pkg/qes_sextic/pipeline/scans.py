from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from scipy.optimize import brentq

from ..errors import NoSignChangeError
from ..models.config import (
    MOMENTUM_QUANTITIES,
    ModelParams,
    Quantity,
    ScanSpec,
    Settings,
    SolverKind,
)
from ..models.results import CriticalCoupling, CurveFeatures, PairingReport, ScanRow
from ..modules.infotheory import (
    crj_divergence,
    default_ho_omega,
    ho_reference_density,
    kl_divergence,
    measure,
    moments,
)
from ..modules.lagrange_mesh import default_config, mesh_solve
from ..modules.momentum import momentum_sample
from ..modules.quadrature import position_rule
from ..modules.sampling import WaveSample, sample
from ..modules.variational import SpectrumResult, solve
from .runner import wrap_point

logger = logging.getLogger(__name__)

DEFAULT_BRACKETS: dict[int, tuple[float, float]] = {
    0: (0.5, 1.0),
    1: (0.5, 1.5),
    2: (3.0, 3.5),
    3: (2.5, 5.0),
}

QUANTITY_COLUMNS: dict[Quantity, str] = {
    Quantity.energy: "energy",
    Quantity.dx: "dx",
    Quantity.dp: "dp",
    Quantity.sx: "sx",
    Quantity.sp: "sp",
    Quantity.st: "st",
    Quantity.heisenberg: "heisenberg",
    Quantity.kl_pairs: "kl_pair",
    Quantity.crj_pairs: "crj_pair",
    Quantity.crj_ho: "crj_ho",
}

PAIR_QUANTITIES = frozenset({Quantity.kl_pairs, Quantity.crj_pairs})

# |E_n(λ_c)| limits for the root solver and for the mesh check at the root
ROOT_RESIDUAL = 1e-9
MESH_RESIDUAL = 1e-7


def scan_columns(spec: ScanSpec) -> list[str]:
    quantities = list(dict.fromkeys(spec.quantities))
    return ["lam", "n", *(QUANTITY_COLUMNS[q] for q in quantities), "status", "note"]


def partner(n: int) -> int:
    """Doublet partner: 0↔1, 2↔3, ..."""
    return n ^ 1


def spectrum_at(
    lam: float | ModelParams,
    solver: SolverKind = SolverKind.variational,
    settings: Settings | None = None,
    count: int = 4,
) -> SpectrumResult:
    settings = settings or Settings()
    params = lam if isinstance(lam, ModelParams) else ModelParams(lam=lam)
    if solver is SolverKind.mesh:
        return mesh_solve(params, default_config(params, settings), count=count)
    return solve(params, settings=settings)


class _PointSamples:
    """Position and momentum samples of one spectrum, computed on first use."""

    def __init__(self, spectrum: SpectrumResult, settings: Settings) -> None:
        self.spectrum = spectrum
        self.settings = settings
        self.rule = position_rule(settings, spectrum.params.tol_quad)
        self._position: dict[int, WaveSample] = {}
        self._momentum: dict[int, WaveSample] = {}

    def position(self, n: int) -> WaveSample:
        if n not in self._position:
            state = self.spectrum.state(n)
            self._position[n] = sample(state.amplitude, self.rule, space="position")
        return self._position[n]

    def momentum(self, n: int) -> WaveSample:
        if n not in self._momentum:
            self._momentum[n] = momentum_sample(self.spectrum.state(n), self.settings)
        return self._momentum[n]


def _state_quantities(
    lam: float,
    n: int,
    quantities: list[Quantity],
    samples: _PointSamples,
    ho_omega: Optional[float],
) -> dict:
    wanted = set(quantities)
    values: dict = {}
    if Quantity.energy in wanted:
        values["energy"] = samples.spectrum.state(n).energy
    if wanted & MOMENTUM_QUANTITIES:
        report = measure(samples.position(n), samples.momentum(n))
        values.update(
            dx=report.delta_x,
            dp=report.delta_p,
            sx=report.s_x,
            sp=report.s_p,
            st=report.s_t,
            heisenberg=report.heisenberg,
        )
    elif wanted & {Quantity.dx, Quantity.sx}:
        _, width, entropy = moments(samples.position(n))
        values.update(dx=width, sx=entropy)
    if wanted & PAIR_QUANTITIES:
        even, odd = sorted((n, partner(n)))
        if Quantity.kl_pairs in wanted:
            values["kl_pair"] = kl_divergence(samples.position(odd), samples.position(even))
        if Quantity.crj_pairs in wanted:
            values["crj_pair"] = crj_divergence(samples.position(even), samples.position(odd))
    if Quantity.crj_ho in wanted:
        omega = ho_omega or default_ho_omega(lam)
        reference = ho_reference_density(n, omega, samples.rule)
        values["crj_ho"] = crj_divergence(samples.position(n), reference)
    columns = {QUANTITY_COLUMNS[q] for q in quantities}
    return {key: value for key, value in values.items() if key in columns}


def _scan_point(lam: float, spec: ScanSpec, settings: Settings) -> list[dict]:
    needed = set(spec.states)
    if set(spec.quantities) & PAIR_QUANTITIES:
        needed |= {partner(n) for n in spec.states}
    try:
        spectrum = spectrum_at(lam, spec.solver, settings, count=max(needed) + 1)
    except Exception as exc:
        logger.warning("solver failed at grid point", extra={"lambda": lam, "error": str(exc)})
        note = f"{type(exc).__name__}: {exc}"
        return [ScanRow(lam=lam, n=n, status="error", note=note).model_dump() for n in spec.states]

    samples = _PointSamples(spectrum, settings)
    return [
        wrap_point(lam, n, lambda n=n: _state_quantities(lam, n, spec.quantities, samples, spec.ho_omega))
        for n in spec.states
    ]


def run_scan(spec: ScanSpec, settings: Settings | None = None) -> list[dict]:
    """One row per (λ, n), λ-major; failed points are flagged rows."""
    settings = settings or Settings()
    if not spec.quantities:
        return []
    grid = spec.grid()
    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            chunks = list(pool.map(lambda lam: _scan_point(lam, spec, settings), grid))
    else:
        chunks = [_scan_point(lam, spec, settings) for lam in grid]
    rows = [row for chunk in chunks for row in chunk]
    logger.info(
        "scan finished",
        extra={"points": len(grid), "rows": len(rows), "errors": sum(r["status"] != "ok" for r in rows)},
    )
    return rows


def find_critical(
    n: int,
    bracket: tuple[float, float] | None = None,
    settings: Settings | None = None,
) -> CriticalCoupling:
    """Coupling λ_c where E_n(λ_c) = 0, by Brent's method on the variational energy."""
    settings = settings or Settings()
    if bracket is None:
        if n not in DEFAULT_BRACKETS:
            raise ValueError(f"no default bracket for n={n}; pass one")
        bracket = DEFAULT_BRACKETS[n]
    lo, hi = bracket
    if not lo < hi:
        raise ValueError(f"bracket must satisfy lo < hi, got {bracket}")

    def energy(lam: float) -> float:
        return solve(ModelParams(lam=lam), settings=settings).state(n).energy

    e_lo, e_hi = energy(lo), energy(hi)
    if not e_lo > 0.0 > e_hi:
        raise NoSignChangeError(
            f"E_{n} does not change sign from positive to negative on [{lo}, {hi}] "
            f"(E({lo})={e_lo:.6g}, E({hi})={e_hi:.6g})"
        )
    lam_c = brentq(energy, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200)
    residual = abs(energy(lam_c))
    status = "ok"
    if residual >= ROOT_RESIDUAL:
        status = "residual"
        logger.warning("critical coupling residual above limit", extra={"n": n, "residual": residual})
    logger.info("critical coupling", extra={"n": n, "lambda_c": lam_c, "residual": residual})
    return CriticalCoupling(n=n, lambda_c=lam_c, bracket=(lo, hi), residual=residual, status=status)


def verify_critical(coupling: CriticalCoupling, settings: Settings | None = None) -> CriticalCoupling:
    """Mesh energy at λ_c; a root the mesh does not confirm is flagged "mesh_mismatch"."""
    spectrum = spectrum_at(coupling.lambda_c, SolverKind.mesh, settings, count=coupling.n + 1)
    mesh_energy = spectrum.state(coupling.n).energy
    status = coupling.status
    if abs(mesh_energy) >= MESH_RESIDUAL and status == "ok":
        status = "mesh_mismatch"
        logger.warning(
            "mesh does not confirm critical coupling",
            extra={"n": coupling.n, "lambda_c": coupling.lambda_c, "mesh_energy": mesh_energy},
        )
    return coupling.model_copy(update={"mesh_energy": mesh_energy, "status": status})


def pairing_report(lam: float, settings: Settings | None = None) -> PairingReport:
    settings = settings or Settings()
    samples = _PointSamples(spectrum_at(lam, settings=settings), settings)
    energies = samples.spectrum.energies
    return PairingReport(
        lam=lam,
        gap_01=energies[1] - energies[0],
        gap_23=energies[3] - energies[2],
        crj_01=crj_divergence(samples.position(0), samples.position(1)),
        crj_23=crj_divergence(samples.position(2), samples.position(3)),
    )


def curve_features(rows: list[dict], quantity: str) -> list[CurveFeatures]:
    """Interior local extrema of each state's curve over λ, from ok rows only."""
    curves: dict[int, list[tuple[float, float]]] = {}
    for row in rows:
        if row.get("status", "ok") != "ok" or row.get(quantity) is None:
            continue
        curves.setdefault(int(row["n"]), []).append((float(row["lam"]), float(row[quantity])))

    features = []
    for n in sorted(curves):
        points = sorted(curves[n])
        maxima, minima = [], []
        for (_, a), (lam, b), (_, c) in zip(points, points[1:], points[2:]):
            if b > a and b > c:
                maxima.append(lam)
            elif b < a and b < c:
                minima.append(lam)
        features.append(CurveFeatures(quantity=quantity, n=n, maxima=maxima, minima=minima))
    return features
