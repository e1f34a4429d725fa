from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

from ..models.config import OutputFormat
from ..models.results import ScanRow
from ..reporting.csv_table import build_csv
from ..reporting.json_doc import build_json

logger = logging.getLogger(__name__)


def wrap_point(lam: float, n: int, func: Callable[[], dict]) -> dict:
    """Run one (λ, n) evaluation; failures become a flagged row instead of propagating."""
    try:
        data = func()
        row = ScanRow(lam=lam, n=n, **data)
    except Exception as exc:
        logger.warning("grid point failed", extra={"lambda": lam, "n": n, "error": str(exc)})
        row = ScanRow(lam=lam, n=n, status="error", note=f"{type(exc).__name__}: {exc}")
    return row.model_dump()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {target}: {exc.strerror or exc}") from exc


def render(rows: list[dict], fmt: OutputFormat, meta: dict, fieldnames: Sequence[str] = ()) -> str:
    if fmt is OutputFormat.json:
        return build_json(rows, meta)
    return build_csv(rows, fieldnames)


def write_output(
    rows: list[dict],
    fmt: OutputFormat,
    path: str | None,
    meta: dict,
    fieldnames: Sequence[str] = (),
) -> None:
    _write_text(path, render(rows, fmt, meta, fieldnames))
    logger.info("output written", extra={"rows": len(rows), "format": fmt.value, "path": path or "-"})
