"""Flat ``key = value`` run files and the value parsers shared with the command line."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Callable

from ..models.config import Quantity


def parse_floats(text: str, count: int, name: str) -> tuple[float, ...]:
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != count or not all(parts):
        raise ValueError(f"{name} expects {count} comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"{name}: {exc}") from exc


def parse_states(text: str) -> list[int]:
    """``0..3`` or ``0,2,3``."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            states = list(range(int(lo), int(hi) + 1))
        else:
            states = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ValueError(f"states: cannot parse {text!r}") from exc
    if not states:
        raise ValueError(f"states: empty selection {text!r}")
    return states


def parse_quantities(text: str) -> list[Quantity]:
    names = [p.strip().replace("-", "_") for p in str(text).split(",") if p.strip()]
    try:
        return [Quantity(name) for name in names]
    except ValueError as exc:
        known = ", ".join(q.value for q in Quantity)
        raise ValueError(f"quantities: {exc} (known: {known})") from exc


PARSERS: dict[str, tuple[str, Callable[[str], Any]]] = {
    "lambda": ("lam", float),
    "lam": ("lam", float),
    "lambda_range": ("lambda_range", lambda v: parse_floats(v, 3, "lambda_range")),
    "states": ("states", parse_states),
    "k_even": ("k_even", int),
    "k_odd": ("k_odd", int),
    "mesh_size": ("mesh_size", int),
    "mesh_scale": ("mesh_scale", float),
    "ho_omega": ("ho_omega", float),
    "quantities": ("quantities", parse_quantities),
    "solver": ("solver", str),
    "n": ("n", int),
    "bracket": ("bracket", lambda v: parse_floats(v, 2, "bracket")),
    "tol_energy": ("tol_energy", float),
    "tol_quad": ("tol_quad", float),
    "format": ("format", str),
    "out": ("out", str),
    "corrections": ("corrections", lambda v: str(v).strip().lower() in {"1", "true", "yes", "on"}),
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in PARSERS:
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
        field, parse = PARSERS[key]
        values[field] = parse(value.strip().strip('"').strip("'"))
    return values


def load_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))
