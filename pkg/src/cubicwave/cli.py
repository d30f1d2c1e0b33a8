"""Command-line front end.

Every command writes records as CSV (default) or as one JSON object with
``meta`` and ``records``. Exit codes: 1 failing verification, 2 bad input,
3 unwritable output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict

import click
import numpy as np

from . import __version__
from .config import DEFAULT, Config
from .duffing import ParameterError, PhasePoint, energy
from .lifespan import (boundary_tplus, e_infinity, t_minus, t_plus, total_lifespan_by_energy,
                       x_critical)
from .norms import kappa, kappa_closed_form
from .penrose import DomainError, physical_blowup_time, sample_field
from .threshold import Behavior, GridSpec, beta, beta_curve, classify_bidirectional, phase_diagram

EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_OUTPUT = 3

KAPPA_NUS = (0.0, 0.1, 0.2, 0.3, 0.4)


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


class OutputError(click.ClickException):
    exit_code = EXIT_OUTPUT


def parse_range(text: str, name: str) -> tuple[float, float, int]:
    """'A:B:N' -> (A, B, N)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"{name} must look like A:B:N, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"{name} must look like A:B:N, got {text!r}") from None
    if not (math.isfinite(a) and math.isfinite(b)) or n < 1:
        raise InputError(f"{name} needs finite bounds and N >= 1, got {text!r}")
    return a, b, n


def parse_list(text: str, name: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{name} must be a comma-separated list of numbers") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise InputError(f"{name} must be a non-empty list of finite numbers")
    return vals


def _point(X: float, Y: float) -> PhasePoint:
    try:
        return PhasePoint(X, Y)
    except ParameterError as exc:
        raise InputError(str(exc)) from None


def _clean(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, np.bool_):
        v = bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def render(records: list[dict], meta: dict, fmt: str) -> str:
    records = [{k: _clean(v) for k, v in r.items()} for r in records]
    if fmt == "json":
        return json.dumps({"meta": meta, "records": records}, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    if records:
        w = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(records)
    return buf.getvalue()


def emit(ctx: click.Context, command: str, records: list[dict], extra_meta: dict | None = None) -> None:
    obj = ctx.obj
    meta = {
        "command": command,
        "version": __version__,
        "tolerance_scale": obj["tol"],
        "config": {k: _clean(v) for k, v in asdict(obj["cfg"]).items()},
    }
    if extra_meta:
        meta.update(extra_meta)
    text = render(records, meta, obj["format"])
    out = obj["out"]
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc.strerror}") from None


@click.group()
@click.option("--tol", type=float, default=1.0, show_default=True,
              help="Multiply every module tolerance by this factor.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write to PATH instead of stdout.")
@click.version_option(__version__, prog_name="cubicwave")
@click.pass_context
def main(ctx: click.Context, tol: float, fmt: str, out: str | None) -> None:
    """Lifespans, threshold curve and asymptotics of the radial cubic wave family."""
    if not (math.isfinite(tol) and tol > 0):
        raise InputError("--tol must be a positive finite number")
    ctx.obj = {"tol": tol, "cfg": DEFAULT.scaled(tol) if tol != 1.0 else DEFAULT,
               "format": fmt, "out": out}


@main.command()
@click.argument("X", type=float)
@click.argument("Y", type=float)
@click.pass_context
def classify(ctx: click.Context, x: float, y: float) -> None:
    """Forward and backward behaviour of the data (X, Y)."""
    cfg: Config = ctx.obj["cfg"]
    p = _point(x, y)
    c = classify_bidirectional(p, cfg)
    tp, tm = t_plus(p, cfg), t_minus(p, cfg)
    rec = {
        "X": p.X, "Y": p.Y, "forward": c.forward.value, "backward": c.backward.value,
        "label": c.label, "T_plus": tp, "T_minus": tm, "energy": energy(p),
        "t_plus": math.tan(0.5 * tp) if c.forward is Behavior.Blowup else math.inf,
        "t_minus": math.tan(0.5 * tm) if c.backward is Behavior.Blowup else -math.inf,
    }
    emit(ctx, "classify", [rec])


@main.command()
@click.pass_context
def constants(ctx: click.Context) -> None:
    """E_inf, X_C, beta(0) and the kappa table, each with its residual."""
    cfg: Config = ctx.obj["cfg"]
    ei = e_infinity(cfg)
    xc = x_critical(cfg)
    b0 = beta(0.0, cfg)
    if not ei > 0.25:
        raise click.ClickException("E_inf must exceed 1/4")
    if not b0 > 0:
        raise click.ClickException("beta(0) must be positive")
    recs = [
        {"name": "E_inf", "nu": "", "value": ei,
         "residual": abs(total_lifespan_by_energy(ei, cfg) - math.pi)},
        {"name": "X_C", "nu": "", "value": xc, "residual": abs(boundary_tplus(xc, cfg) - math.pi)},
        {"name": "beta(0)", "nu": "", "value": b0,
         "residual": abs(t_plus(PhasePoint(0.0, b0), cfg) - math.pi)},
    ]
    for nu in KAPPA_NUS:
        k = kappa(nu, cfg)
        recs.append({"name": "kappa", "nu": nu, "value": k, "residual": abs(k - kappa_closed_form(nu))})
    emit(ctx, "constants", recs)


@main.command("beta-curve")
@click.option("--grid", default="-3:3:61", show_default=True, help="X0:X1:N")
@click.pass_context
def beta_curve_cmd(ctx: click.Context, grid: str) -> None:
    """Samples of the threshold curve Y = beta(X)."""
    cfg: Config = ctx.obj["cfg"]
    x0, x1, n = parse_range(grid, "--grid")
    if n < 2:
        raise InputError("--grid needs N >= 2")
    curve = beta_curve(x0, x1, n, cfg)
    recs = [{"X": x, "beta": b} for x, b in zip(curve.xs, curve.betas)]
    emit(ctx, "beta-curve", recs, {"grid": {"x0": x0, "x1": x1, "nx": n}, "X_C": curve.x_c})


@main.command("phase-diagram")
@click.option("--grid", default="-3:3:11", show_default=True, help="X0:X1:N")
@click.option("--ygrid", default=None, help="Y0:Y1:N (defaults to --grid)")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--curve/--no-curve", default=False, help="Also emit the threshold-curve crossings.")
@click.pass_context
def phase_diagram_cmd(ctx: click.Context, grid: str, ygrid: str | None, workers: int, curve: bool) -> None:
    """Nine-class tag (forward/backward) on a rectangular grid."""
    cfg: Config = ctx.obj["cfg"]
    x0, x1, nx = parse_range(grid, "--grid")
    y0, y1, ny = parse_range(ygrid, "--ygrid") if ygrid else (x0, x1, nx)
    spec = GridSpec(x0, x1, nx, y0, y1, ny)
    diag = phase_diagram(spec, cfg, workers)
    recs = []
    for i, y in enumerate(diag.ys):
        for j, x in enumerate(diag.xs):
            c = diag.cells[i][j]
            recs.append({"X": x, "Y": y, "forward": c.forward.value, "backward": c.backward.value,
                         "label": c.label, "source": "grid"})
    if curve:
        for p, c in diag.curve_points:
            recs.append({"X": p.X, "Y": p.Y, "forward": c.forward.value, "backward": c.backward.value,
                         "label": c.label, "source": "curve"})
    emit(ctx, "phase-diagram", recs,
         {"grid": {"x0": x0, "x1": x1, "nx": nx, "y0": y0, "y1": y1, "ny": ny},
          "classes_present": sorted(diag.classes_present())})


@main.command()
@click.argument("X", type=float)
@click.argument("Y", type=float)
@click.option("--times", default="0", show_default=True, help="Comma-separated list of t.")
@click.option("--rgrid", default="0:10:101", show_default=True, help="R0:R1:N")
@click.pass_context
def evolve(ctx: click.Context, x: float, y: float, times: str, rgrid: str) -> None:
    """Radial snapshots (t, r, u, u_t, in_domain) of the solution."""
    cfg: Config = ctx.obj["cfg"]
    p = _point(x, y)
    ts = parse_list(times, "--times")
    r0, r1, n = parse_range(rgrid, "--rgrid")
    if r0 < 0 or r1 < r0:
        raise InputError("--rgrid needs 0 <= R0 <= R1")
    rs = np.linspace(r0, r1, n)
    tp = physical_blowup_time(p, cfg)
    tm = -physical_blowup_time(p.reflected(), cfg)
    recs = []
    for t in ts:
        if t >= tp or t <= tm:
            raise InputError(f"t={t} is outside the lifespan: the solution blows up at "
                             f"t={tp if t >= tp else tm} (at r=0)")
        try:
            f = sample_field(p, t, rs, cfg)
        except DomainError as exc:
            raise InputError(str(exc)) from None
        for r, u, ut, m in zip(rs, f.u, f.ut, f.in_domain):
            recs.append({"t": t, "r": r, "u": u if m else math.nan, "u_t": ut if m else math.nan,
                         "in_domain": bool(m)})
    emit(ctx, "evolve", recs, {"X": p.X, "Y": p.Y, "rgrid": {"r0": r0, "r1": r1, "n": n}})


@main.command()
@click.argument("suite")
@click.pass_context
def verify(ctx: click.Context, suite: str) -> None:
    """Run an acceptance suite; exit 0 only if every check passes."""
    from .verify import SUITES, run_suite

    if suite not in SUITES:
        raise InputError(f"unknown suite {suite!r}; choose from {', '.join(sorted(SUITES))}")
    results = run_suite(suite, ctx.obj["cfg"])
    recs = []
    for res in results:
        click.echo(res.line(), err=True)
        for chk in res.checks:
            rec = chk.as_record()
            recs.append({"criterion": res.number, "title": res.title, "check": rec["name"],
                         "passed": rec["passed"], "measured": rec["measured"],
                         "target": rec["target"], "tolerance": rec["tolerance"],
                         "detail": json.dumps(rec["detail"], sort_keys=True)})
    emit(ctx, "verify", recs, {"suite": suite})
    if not all(r.passed for r in results):
        ctx.exit(EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
