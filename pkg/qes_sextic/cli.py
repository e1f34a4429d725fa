from __future__ import annotations

import json
import logging
import sys
from datetime import datetime, timezone
from typing import Optional

import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table

try:  # typer>=0.2x vendors click and raises its own exception classes
    from typer._click import exceptions as click_exceptions
except ImportError:
    from click import exceptions as click_exceptions

from .errors import NumericalError
from .models.config import OutputFormat, SolverKind
from .pipeline.service import create_run_config, execute_run
from .utils.config_file import parse_floats, parse_quantities, parse_states

app = typer.Typer(add_completion=False, help="Spectra, entropies and divergences of the sextic double well.")

SYNOPSIS = (
    "usage: qes-sextic {solve|scan|critical|entropy|divergence|wkb|qes-check|selftest} [options]\n"
    "  --lambda X | --lambda-range lo,hi,step  --states 0..3  --k-even K --k-odd K\n"
    "  --mesh-size N --mesh-scale H --ho-omega W --format csv|json --out PATH --config PATH"
)

_RESERVED = set(logging.LogRecord("", 0, "", 0, "", (), None).__dict__) | {"message", "asctime"}


class JsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "level": record.levelname,
            "name": record.name,
            "message": record.getMessage(),
            "time": datetime.now(timezone.utc).isoformat(),
        }
        payload.update({k: v for k, v in record.__dict__.items() if k not in _RESERVED})
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonFormatter())
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, handlers=[handler], force=True)


LAMBDA = typer.Option(None, "--lambda", help="Coupling constant.")
LAMBDA_RANGE = typer.Option(None, "--lambda-range", help="lo,hi,step")
STATES = typer.Option(None, "--states", help="State indices, 0..3 or 0,1,2.")
K_EVEN = typer.Option(None, "--k-even", help="Even-sector basis size.")
K_ODD = typer.Option(None, "--k-odd", help="Odd-sector basis size.")
MESH_SIZE = typer.Option(None, "--mesh-size")
MESH_SCALE = typer.Option(None, "--mesh-scale")
HO_OMEGA = typer.Option(None, "--ho-omega", help="Oscillator frequency for HO comparisons.")
QUANTITIES = typer.Option(None, "--quantities", help="energy,dx,dp,sx,sp,st,heisenberg,kl_pairs,crj_pairs,crj_ho")
SOLVER = typer.Option(None, "--solver")
FORMAT = typer.Option(None, "--format")
OUT = typer.Option(None, "--out", help="Output file; stdout when omitted.")
CONFIG = typer.Option(None, "--config", help="Flat key = value run file; flags win.")
VERBOSE = typer.Option(False, "--verbose")
QUIET = typer.Option(False, "--quiet")


def _run(command: str, config_path: Optional[str], verbose: bool, quiet: bool, **flags) -> list[dict]:
    setup_logging(verbose, quiet)
    config = create_run_config(command, config_path, **flags)
    return execute_run(config)


def _parsed(value: Optional[str], parser, *args):
    return None if value is None else parser(value, *args)


@app.command()
def solve(
    lam: Optional[float] = LAMBDA,
    states: Optional[str] = STATES,
    k_even: Optional[int] = K_EVEN,
    k_odd: Optional[int] = K_ODD,
    mesh_size: Optional[int] = MESH_SIZE,
    mesh_scale: Optional[float] = MESH_SCALE,
    solver: Optional[SolverKind] = SOLVER,
    fmt: Optional[OutputFormat] = FORMAT,
    out: Optional[str] = OUT,
    config: Optional[str] = CONFIG,
    verbose: bool = VERBOSE,
    quiet: bool = QUIET,
) -> None:
    """Energies and basis coefficients at one coupling."""
    _run(
        "solve", config, verbose, quiet,
        lam=lam, states=_parsed(states, parse_states), k_even=k_even, k_odd=k_odd,
        mesh_size=mesh_size, mesh_scale=mesh_scale, solver=solver, format=fmt, out=out,
    )


@app.command()
def scan(
    lambda_range: Optional[str] = LAMBDA_RANGE,
    states: Optional[str] = STATES,
    quantities: Optional[str] = QUANTITIES,
    solver: Optional[SolverKind] = SOLVER,
    ho_omega: Optional[float] = HO_OMEGA,
    k_even: Optional[int] = K_EVEN,
    k_odd: Optional[int] = K_ODD,
    mesh_size: Optional[int] = MESH_SIZE,
    mesh_scale: Optional[float] = MESH_SCALE,
    fmt: Optional[OutputFormat] = FORMAT,
    out: Optional[str] = OUT,
    config: Optional[str] = CONFIG,
    verbose: bool = VERBOSE,
    quiet: bool = QUIET,
) -> None:
    """Sweep the coupling and tabulate the requested quantities."""
    _run(
        "scan", config, verbose, quiet,
        lambda_range=_parsed(lambda_range, parse_floats, 3, "--lambda-range"),
        states=_parsed(states, parse_states), quantities=_parsed(quantities, parse_quantities),
        solver=solver, ho_omega=ho_omega, k_even=k_even, k_odd=k_odd,
        mesh_size=mesh_size, mesh_scale=mesh_scale, format=fmt, out=out,
    )


@app.command()
def critical(
    n: Optional[int] = typer.Option(None, "--n", help="State index."),
    bracket: Optional[str] = typer.Option(None, "--bracket", help="lo,hi"),
    k_even: Optional[int] = K_EVEN,
    k_odd: Optional[int] = K_ODD,
    mesh_size: Optional[int] = MESH_SIZE,
    fmt: Optional[OutputFormat] = FORMAT,
    out: Optional[str] = OUT,
    config: Optional[str] = CONFIG,
    verbose: bool = VERBOSE,
    quiet: bool = QUIET,
) -> None:
    """Coupling at which E_n crosses zero."""
    _run(
        "critical", config, verbose, quiet,
        n=n, bracket=_parsed(bracket, parse_floats, 2, "--bracket"),
        k_even=k_even, k_odd=k_odd, mesh_size=mesh_size, format=fmt, out=out,
    )


@app.command()
def entropy(
    lam: Optional[float] = LAMBDA,
    states: Optional[str] = STATES,
    solver: Optional[SolverKind] = SOLVER,
    k_even: Optional[int] = K_EVEN,
    k_odd: Optional[int] = K_ODD,
    mesh_size: Optional[int] = MESH_SIZE,
    mesh_scale: Optional[float] = MESH_SCALE,
    fmt: Optional[OutputFormat] = FORMAT,
    out: Optional[str] = OUT,
    config: Optional[str] = CONFIG,
    verbose: bool = VERBOSE,
    quiet: bool = QUIET,
) -> None:
    """Widths and Shannon entropies per state."""
    _run(
        "entropy", config, verbose, quiet,
        lam=lam, states=_parsed(states, parse_states), solver=solver, k_even=k_even, k_odd=k_odd,
        mesh_size=mesh_size, mesh_scale=mesh_scale, format=fmt, out=out,
    )


@app.command()
def divergence(
    lam: Optional[float] = LAMBDA,
    states: Optional[str] = STATES,
    ho_omega: Optional[float] = HO_OMEGA,
    solver: Optional[SolverKind] = SOLVER,
    k_even: Optional[int] = K_EVEN,
    k_odd: Optional[int] = K_ODD,
    mesh_size: Optional[int] = MESH_SIZE,
    mesh_scale: Optional[float] = MESH_SCALE,
    fmt: Optional[OutputFormat] = FORMAT,
    out: Optional[str] = OUT,
    config: Optional[str] = CONFIG,
    verbose: bool = VERBOSE,
    quiet: bool = QUIET,
) -> None:
    """KL and CRJ divergences: doublets, oscillator references, exact sectors."""
    _run(
        "divergence", config, verbose, quiet,
        lam=lam, states=_parsed(states, parse_states), ho_omega=ho_omega, solver=solver,
        k_even=k_even, k_odd=k_odd, mesh_size=mesh_size, mesh_scale=mesh_scale, format=fmt, out=out,
    )


@app.command()
def wkb(
    lam: Optional[float] = LAMBDA,
    states: Optional[str] = STATES,
    corrections: Optional[bool] = typer.Option(None, "--corrections/--leading-order"),
    fmt: Optional[OutputFormat] = FORMAT,
    out: Optional[str] = OUT,
    config: Optional[str] = CONFIG,
    verbose: bool = VERBOSE,
    quiet: bool = QUIET,
) -> None:
    """Semiclassical levels for |lambda| large."""
    _run(
        "wkb", config, verbose, quiet,
        lam=lam, states=_parsed(states, parse_states), corrections=corrections, format=fmt, out=out,
    )


@app.command("qes-check")
def qes_check(
    lam: Optional[float] = LAMBDA,
    k_even: Optional[int] = K_EVEN,
    k_odd: Optional[int] = K_ODD,
    fmt: Optional[OutputFormat] = FORMAT,
    out: Optional[str] = OUT,
    config: Optional[str] = CONFIG,
    verbose: bool = VERBOSE,
    quiet: bool = QUIET,
) -> None:
    """Exact algebraic sector against the variational solver."""
    _run("qes-check", config, verbose, quiet, lam=lam, k_even=k_even, k_odd=k_odd, format=fmt, out=out)


@app.command()
def selftest(
    fmt: Optional[OutputFormat] = FORMAT,
    out: Optional[str] = OUT,
    verbose: bool = VERBOSE,
    quiet: bool = QUIET,
) -> None:
    """Run the invariant checks; exit 2 when any fails."""
    rows = _run("selftest", None, verbose, quiet, format=fmt, out=out)
    table = Table(title="qes-sextic selftest")
    for column in ("check", "result", "detail"):
        table.add_column(column)
    for row in rows:
        table.add_row(row["id"], "[green]pass[/green]" if row["passed"] else "[red]FAIL[/red]", escape(row["detail"]))
    Console(stderr=True).print(table)
    if not all(row["passed"] for row in rows):
        raise typer.Exit(2)


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point: 0 on success, 1 on usage errors, 2 on numerical failures."""
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        result = app(args=args, prog_name="qes-sextic", standalone_mode=False)
    except click_exceptions.UsageError as exc:
        typer.echo(f"error: {exc.format_message()}", err=True)
        typer.echo(SYNOPSIS, err=True)
        return 1
    except click_exceptions.Abort:
        return 1
    except NumericalError as exc:
        typer.echo(f"numerical failure: {exc}", err=True)
        return 2
    except (ValueError, OSError) as exc:
        typer.echo(f"error: {exc}", err=True)
        typer.echo(SYNOPSIS, err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
