"""Command-line front end: integrate, map, shoot, analyze, verify.

Tables go to CSV (header row, then values printed with 17 significant
digits) or JSON ({"columns": [...], "rows": [[...], ...]}).  Output is
written to --output or to stdout.  Any option can also come from a JSON
file given with --config; keys are option names with dashes or
underscores, and explicit flags win.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys

import click
import numpy as np

from . import _backend
from .asd import (CLOSED_FORM_KINDS, InstantonState, closed_form_solution, conserved_quantity,
                  integrate_asd)
from .critical import algebraicity_verdict, fit_exponent, rationality_test
from .errors import (EXIT_CODES, DegenerateBranchError, DomainError, InstantonError,
                     SuiteFailure)
from .painleve import PviSample, map_point, pvi_residual
from .shooting import ShootingConfig, shoot, solve_for_target
from .verify import run_suite

EXIT_HELP = "\n".join(
    ["Exit codes:", "", "\b", "  0  success", "  1  unexpected internal error",
     "  2  bad command line (usage error)"]
    + [f"  {code}  {name}" for name, code in sorted(EXIT_CODES.items(), key=lambda kv: kv[1])]
)

MAP_COLUMNS = ("t", "x", "y_re", "y_im", "dy_dx_re", "dy_dx_im", "residual")
TRAJ_COLUMNS = ("t", "a1", "a2", "a3", "conserved_quantity")


def _fmt(v):
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    return "%.17g" % v


def _json_value(v):
    if v is None:
        return None
    if isinstance(v, (bool, str)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, complex):
        return {"re": _json_value(v.real), "im": _json_value(v.imag)}
    v = float(v)
    return v if math.isfinite(v) else None


def render_table(columns, rows, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    doc = {"columns": list(columns), "rows": [[_json_value(v) for v in r] for r in rows]}
    return json.dumps(doc, indent=1) + "\n"


def emit(text, output):
    if output in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def emit_json(obj, output):
    emit(json.dumps(obj, indent=1, sort_keys=True) + "\n", output)


def _load_config(ctx, param, value):
    if value:
        with open(value, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise click.BadParameter("config must hold a JSON object")
        names = {}
        for p in ctx.command.params:
            names[p.name] = p.name
            for o in p.opts:
                names[o.lstrip("-").replace("-", "_")] = p.name
        unknown = [k for k in data if k.replace("-", "_") not in names]
        if unknown:
            raise click.BadParameter(f"unknown option(s) in config: {', '.join(unknown)}")
        ctx.default_map = {names[k.replace("-", "_")]: v for k, v in data.items()}
    return value


config_option = click.option(
    "--config", type=click.Path(exists=True, dir_okay=False), callback=_load_config,
    is_eager=True, expose_value=False, help="JSON file of option values.")


def _parse_triple(text):
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = [p for p in str(text).split(",") if p.strip()]
    if len(parts) != 3:
        raise click.BadParameter("expected three comma-separated numbers")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as e:
        raise click.BadParameter(str(e))


def _initial_state(a, preset, t0, theta):
    if (a is None) == (preset is None):
        raise click.UsageError("give exactly one of --a and --preset")
    if preset is not None:
        return closed_form_solution(preset, t0, theta if preset.startswith("degenerate") else None)
    return InstantonState(t0, *_parse_triple(a))


def _theta_for(s0, theta, branch):
    if theta is not None:
        return theta
    q = conserved_quantity(s0)
    root = math.sqrt(abs(q))
    return branch * root if q >= 0 else complex(0.0, branch * root)


state_options = [
    click.option("--a", "a", default=None, help="Initial a1,a2,a3."),
    click.option("--preset", type=click.Choice(CLOSED_FORM_KINDS), default=None,
                 help="Built-in closed-form initial state."),
    click.option("--t0", type=float, default=0.5, show_default=True),
    click.option("--t-end", type=float, default=0.9, show_default=True),
    click.option("--tol", type=float, default=1e-10, show_default=True),
    click.option("--theta", type=float, default=None,
                 help="theta (degenerate presets; map overrides the first integral)."),
    click.option("--backend", type=click.Choice(_backend.BACKENDS), default=None,
                 help="Integration kernel."),
]
output_options = [
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                 show_default=True),
    click.option("--output", "-o", default=None, help="Output file (default stdout)."),
]


def _apply(opts):
    def deco(f):
        for o in reversed(opts):
            f = o(f)
        return f
    return deco


def resample_grid(t0, t_end, n):
    """n points from t0 to t_end, geometric in the distance to 0 or 1."""
    if n < 2:
        raise DomainError("--n-points must be at least 2")
    if t_end > t0:
        return 1 - np.geomspace(1 - t0, 1 - t_end, n)
    return np.geomspace(t0, t_end, n)


class Main(click.Group):
    """Group that turns library errors into their exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except InstantonError as e:
            where = f" (t={e.t!r})" if getattr(e, "t", None) is not None else ""
            click.echo(f"error: {type(e).__name__}: {e}{where}", err=True)
            ctx.exit(e.exit_code)


@click.group(cls=Main, epilog=EXIT_HELP)
@click.version_option(package_name="artifact")
def main():
    """Reduced SU(2) instantons on S^4 and the Painleve VI solutions they define."""


@main.command(epilog=EXIT_HELP)
@config_option
@_apply(state_options + output_options)
def integrate(a, preset, t0, t_end, tol, theta, backend, fmt, output):
    """Integrate the ASD system; columns t, a1, a2, a3, conserved_quantity."""
    s0 = _initial_state(a, preset, t0, theta)
    tr = integrate_asd(s0, t_end, tol, backend=backend)
    q = tr.conserved()
    rows = [(t, *ai, qi) for t, ai, qi in zip(tr.ts, tr.a, q)]
    emit(render_table(TRAJ_COLUMNS, rows, fmt), output)


@main.command("map", epilog=EXIT_HELP)
@config_option
@_apply(state_options)
@click.option("--sign-choice", type=click.Choice(["-1", "1"]), default="-1", show_default=True,
              help="Sign s in alpha = (theta + 2s)^2/8.")
@click.option("--theta-branch", type=click.Choice(["1", "-1"]), default="1", show_default=True,
              help="Sign of theta when it is taken from the first integral.")
@click.option("--convention", type=click.Choice(["standard", "displayed"]), default="standard",
              show_default=True, help="Form of the equation used for the residual column.")
@click.option("--n-points", type=int, default=0, show_default=True,
              help="Resample on N points, geometric in the distance to the singular "
                   "point (t=0 or t=1) beyond t-end; 0 keeps the integrator's samples.")
@_apply(output_options)
def map_cmd(a, preset, t0, t_end, tol, theta, backend, sign_choice, theta_branch, convention,
            n_points, fmt, output):
    """Map a trajectory to Painleve VI; columns t, x, y_re, y_im, dy_dx_re, dy_dx_im, residual.

    Residuals are scaled by the largest term of the equation; samples
    within 1e-8 of y = 0, 1 or x get nan.
    """
    s0 = _initial_state(a, preset, t0, theta)
    nonzero = sum(1 for v in s0.a if v != 0)
    if nonzero < 2:
        raise DegenerateBranchError(
            f"two of the a_i vanish at t={s0.t!r}; the map needs two nonzero components")
    tr = integrate_asd(s0, t_end, tol, backend=backend)
    s = int(sign_choice)
    th = _theta_for(s0, theta, int(theta_branch))
    if n_points:
        ts = resample_grid(t0, t_end, n_points)
        states = [tr.interpolate(t)[0] for t in ts]
    else:
        ts, states = tr.ts, tr.a
    rows = []
    for t, ai in zip(ts, states):
        p = map_point(float(t), ai, th, s, check=False)
        if p.pole_distance < 1e-8:
            r = float("nan")
        else:
            r = pvi_residual(p, th, s, convention)
        y, yp = complex(p.y), complex(p.dy_dx)
        rows.append((p.t_source, p.x, y.real, y.imag, yp.real, yp.imag, r))
    emit(render_table(MAP_COLUMNS, rows, fmt), output)


@main.command("shoot", epilog=EXIT_HELP)
@config_option
@click.option("--r-minus", type=float, required=True)
@click.option("--c", type=float, default=None, help="Boundary coefficient (direct shot).")
@click.option("--target-r-plus", type=float, default=None, help="Solve for c instead.")
@click.option("--tol", type=float, default=1e-10, show_default=True, help="Integrator tolerance.")
@click.option("--target-tol", type=float, default=1e-6, show_default=True)
@click.option("--eps-start", type=float, default=1e-5, show_default=True)
@click.option("--eps-end", type=float, default=1e-6, show_default=True)
@click.option("--c-cap", type=float, default=64.0, show_default=True)
@click.option("--trajectory-out", default=None, help="Also write the trajectory as CSV.")
@click.option("--output", "-o", default=None)
def shoot_cmd(r_minus, c, target_r_plus, tol, target_tol, eps_start, eps_end, c_cap,
              trajectory_out, output):
    """Shoot from t = 1; JSON with c, r_plus, theta."""
    if (c is None) == (target_r_plus is None):
        raise click.UsageError("give exactly one of --c and --target-r-plus")
    kw = dict(eps_start=eps_start, eps_end=eps_end)
    rm = int(r_minus) if float(r_minus).is_integer() else r_minus
    if c is None:
        c, res = solve_for_target(target_r_plus, rm, target_tol, c_cap=c_cap,
                                  integrator_tol=tol, **kw)
    else:
        res = shoot(ShootingConfig(c, rm, tol=tol, **kw))
    doc = {
        "c": c,
        "r_minus": r_minus,
        "r_plus": res.r_plus,
        "r_plus_error_estimate": res.r_plus_error_estimate,
        "theta": res.theta.theta(),
        "theta_squared": res.theta.theta_squared,
        "flags": list(res.flags),
    }
    if trajectory_out:
        tr = res.trajectory
        rows = [(t, *ai, qi) for t, ai, qi in zip(tr.ts, tr.a, tr.conserved())]
        emit(render_table(TRAJ_COLUMNS, rows, "csv"), trajectory_out)
    emit_json({k: _json_value(v) if not isinstance(v, list) else v for k, v in doc.items()},
              output)


def read_solution(path):
    """PviSamples from a map-command CSV (or any CSV with x and y columns)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "x" not in reader.fieldnames:
            raise DomainError(f"{path}: need at least columns x and y_re (or y)")
        out = []
        for row in reader:
            yr = float(row.get("y_re", row.get("y", "nan")))
            yi = float(row.get("y_im") or 0.0)
            y = complex(yr, yi) if yi else yr
            out.append(PviSample(float(row.get("t") or "nan"), float(row["x"]), y,
                                 float("nan")))
    return out


@main.command(epilog=EXIT_HELP)
@config_option
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--point", type=click.Choice(["zero", "one", "infinity"]), multiple=True,
              required=True, help="Critical point; repeat for several.")
@click.option("--rho", type=float, default=1e-3, show_default=True, help="Window ratio.")
@click.option("--t-min", type=float, default=None, help="Only rows with t >= t-min.")
@click.option("--t-max", type=float, default=None, help="Only rows with t <= t-max.")
@click.option("--max-denominator", type=int, default=12, show_default=True)
@click.option("--rational-tol", type=float, default=1e-3, show_default=True)
@click.option("--theta", type=float, default=None, help="Also render a verdict for this theta.")
@click.option("--output", "-o", default=None)
def analyze(input_path, point, rho, t_min, t_max, max_denominator, rational_tol, theta, output):
    """Fit power laws at critical points; CriticalFit JSON."""
    samples = read_solution(input_path)
    if t_min is not None:
        samples = [s for s in samples if not s.t_source < t_min]
    if t_max is not None:
        samples = [s for s in samples if not s.t_source > t_max]
    fits, docs = [], []
    for p in point:
        f = fit_exponent(samples, p, rho=rho)
        fits.append(f)
        rt = rationality_test(f.exponent, max_denominator, rational_tol)
        docs.append({
            "point": f.point,
            "exponent": f.exponent,
            "amplitude": _json_value(f.amplitude),
            "fit_residual": f.fit_residual,
            "window": list(f.window),
            "n_samples": f.n_samples,
            "rational": None if rt is None else {"p": rt[0], "q": rt[1], "in_range": rt[2]},
        })
    doc = {"fits": docs}
    if theta is not None:
        v = algebraicity_verdict(theta, fits, (), max_denominator=max_denominator,
                                 rational_tol=rational_tol)
        doc["verdict"] = {"verdict": v.verdict, "reasons": list(v.reasons)}
    emit_json(doc if len(docs) > 1 or theta is not None else docs[0], output)


@main.command(epilog=EXIT_HELP)
@click.option("--seed", type=int, default=0, show_default=True)
def verify(seed):
    """Run the built-in invariant suite and print a pass/fail table."""
    results = run_suite(seed)
    width = max(len(r[0]) for r in results)
    click.echo(f"backend: {_backend.active_backend()}")
    for name, ok, detail, sec in results:
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {sec:7.3f}s  {detail}")
    failed = [r[0] for r in results if not r[1]]
    if failed:
        raise SuiteFailure(f"{len(failed)} check(s) failed: {', '.join(failed)}")
    click.echo(f"all {len(results)} checks passed")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
