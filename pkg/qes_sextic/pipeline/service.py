from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Callable

from ..errors import NotTrappedError
from ..models.config import ParitySector, RunConfig, SolverKind
from ..modules import qes_exact, wkb
from ..modules.infotheory import (
    default_ho_omega,
    divergence_report,
    ho_reference_density,
    measure_state,
)
from ..modules.quadrature import position_rule
from ..modules.sampling import sample
from ..reporting.json_doc import build_meta
from ..utils.config_file import load_config_file
from .runner import write_output
from .scans import (
    find_critical,
    partner,
    run_scan,
    scan_columns,
    spectrum_at,
    verify_critical,
)
from .selftest import run_checks

logger = logging.getLogger(__name__)

Rows = list[dict]


def create_run_config(command: str, config_path: str | Path | None = None, **flags: Any) -> RunConfig:
    """File values first, then every flag that was actually given."""
    values: dict[str, Any] = {}
    if config_path is not None:
        values.update(load_config_file(config_path))
    values.update({key: value for key, value in flags.items() if value is not None})
    return RunConfig(command=command, **values)


def _spectrum(config: RunConfig, count: int = 4):
    return spectrum_at(config.params(), config.solver, config.settings(), count=count)


def _solve_rows(config: RunConfig) -> tuple[Rows, list[str]]:
    lam = config.params().lam
    spectrum = _spectrum(config, count=max(config.states) + 1)
    rows = []
    for n in config.states:
        state = spectrum.state(n)
        is_mesh = spectrum.solver == SolverKind.mesh.value
        rows.append(
            {
                "lam": lam,
                "n": n,
                "parity": state.parity.value,
                "energy": state.energy,
                "solver": spectrum.solver,
                "basis_size": spectrum.basis_sizes[0 if state.parity is ParitySector.even else 1],
                "norm_constant": None if is_mesh else state.norm_constant,
                "coefficients": None if is_mesh else [float(c) for c in state.coefficients],
            }
        )
    columns = ["lam", "n", "parity", "energy", "solver", "basis_size", "norm_constant", "coefficients"]
    return rows, columns


def _scan_rows(config: RunConfig) -> tuple[Rows, list[str]]:
    spec = config.scan_spec()
    return run_scan(spec, config.settings()), scan_columns(spec)


def _critical_rows(config: RunConfig) -> tuple[Rows, list[str]]:
    settings = config.settings()
    coupling = verify_critical(find_critical(config.n, config.bracket, settings), settings)
    lo, hi = coupling.bracket
    row = {
        "n": coupling.n,
        "lambda_c": coupling.lambda_c,
        "lo": lo,
        "hi": hi,
        "residual": coupling.residual,
        "mesh_energy": coupling.mesh_energy,
        "status": coupling.status,
    }
    return [row], list(row)


def _entropy_rows(config: RunConfig) -> tuple[Rows, list[str]]:
    lam = config.params().lam
    settings = config.settings()
    spectrum = _spectrum(config, count=max(config.states) + 1)
    rows = []
    for n in config.states:
        report = measure_state(spectrum.state(n), settings)
        rows.append({"lam": lam, "n": n, **report.model_dump()})
    columns = ["lam", "n", "delta_x", "delta_p", "s_x", "s_p", "s_t", "heisenberg", "mean_x", "mean_p"]
    return rows, columns


def _divergence_rows(config: RunConfig) -> tuple[Rows, list[str]]:
    params = config.params()
    lam = params.lam
    settings = config.settings()
    rule = position_rule(settings, params.tol_quad)
    needed = sorted(set(config.states) | {partner(n) for n in config.states})
    spectrum = _spectrum(config, count=max(needed) + 1)
    densities = {n: sample(spectrum.state(n).amplitude, rule) for n in needed}
    rows: Rows = []

    def add(kind: str, first: str, second: str, a, b) -> None:
        report = divergence_report(a, b, first, second)
        rows.append(
            {
                "lam": lam,
                "kind": kind,
                "first": first,
                "second": second,
                "kl": report.kl,
                "crj": report.crj,
                "near_singular": report.near_singular,
            }
        )

    for even in sorted({n & ~1 for n in config.states}):
        odd = even + 1
        add("pair", f"rho{odd}", f"rho{even}", densities[odd], densities[even])

    omega = config.ho_omega or default_ho_omega(lam)
    for n in config.states:
        add("ho", f"rho{n}", f"ho{n}", densities[n], ho_reference_density(n, omega, rule))

    if qes_exact.admissible(lam) is not None:
        sector = qes_exact.build_sector(lam)
        for which in range(sector.dimension):
            n = sector.global_index(which)
            if n not in densities:
                continue
            exact = sample(qes_exact.sector_state(sector, which, rule).amplitude, rule, method="exact")
            add("exact", f"exact{n}", f"rho{n}", exact, densities[n])
    return rows, ["lam", "kind", "first", "second", "kl", "crj", "near_singular"]


def _wkb_rows(config: RunConfig) -> tuple[Rows, list[str]]:
    lam = config.params().lam
    columns = [
        "lam", "n", "kind", "epsilon_n", "energy", "y1", "y2", "action", "splitting_estimate", "status", "note",
    ]
    rows: Rows = []
    for n in config.states:
        if lam < 0:
            rows.append({"lam": lam, "n": n, "kind": "harmonic", "energy": wkb.harmonic_limit(n, lam), "status": "ok"})
            continue
        try:
            result = wkb.quantize(n, lam, corrections=config.corrections)
        except NotTrappedError as exc:
            rows.append({"lam": lam, "n": n, "kind": "semiclassical", "status": "not_trapped", "note": str(exc)})
            continue
        y1, y2 = result.turning_points
        rows.append(
            {
                "lam": lam,
                "n": n,
                "kind": "semiclassical",
                "epsilon_n": result.epsilon_n,
                "energy": result.energy,
                "y1": y1,
                "y2": y2,
                "action": result.action,
                "splitting_estimate": result.splitting_estimate,
                "status": "ok",
            }
        )
    return rows, columns


def _qes_rows(config: RunConfig) -> tuple[Rows, list[str]]:
    params = config.params()
    lam = params.lam
    sector = qes_exact.build_sector(lam)
    defect = qes_exact.reflection_defect(lam)
    spectrum = spectrum_at(params, SolverKind.variational, config.settings())
    rows = []
    for which, exact in enumerate(sector.eigenvalues):
        n = sector.global_index(which)
        try:
            variational = spectrum.state(n).energy
            delta = abs(variational - exact) / max(abs(exact), 1.0)
        except IndexError:
            variational, delta = None, None
        rows.append(
            {
                "lam": lam,
                "n": n,
                "parity": sector.parity.value,
                "exact_energy": float(exact),
                "variational_energy": variational,
                "relative_delta": delta,
                "reflection_defect": defect,
            }
        )
    columns = ["lam", "n", "parity", "exact_energy", "variational_energy", "relative_delta", "reflection_defect"]
    return rows, columns


def _selftest_rows(config: RunConfig) -> tuple[Rows, list[str]]:
    return [check.model_dump() for check in run_checks(config.settings())], ["id", "label", "passed", "detail"]


EXECUTORS: dict[str, Callable[[RunConfig], tuple[Rows, list[str]]]] = {
    "solve": _solve_rows,
    "scan": _scan_rows,
    "critical": _critical_rows,
    "entropy": _entropy_rows,
    "divergence": _divergence_rows,
    "wkb": _wkb_rows,
    "qes-check": _qes_rows,
    "selftest": _selftest_rows,
}


def execute_run(config: RunConfig) -> Rows:
    rows, columns = EXECUTORS[config.command](config)
    meta = build_meta(config.command, config.model_dump(mode="json", exclude={"command"}))
    write_output(rows, config.format, config.out, meta, columns)
    return rows
