"""Run orchestration: model/IC assembly, artifact output, comparisons, scans."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .closures import make_closure
from .errors import ConfigError, InvalidState, SolverDivergence
from .euler import EulerModel, EulerState
from .moment13 import Moment13Model, to_conserved
from .presets import RunConfig, with_closure
from .scheme import FieldArray, RunResult, riemann_field, run

__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_SOLVER",
    "EXIT_INVALID",
    "build_model",
    "initial_field",
    "run_config",
    "run_and_report",
    "compare_closures",
    "stability_scan",
    "write_snapshot_csv",
    "read_snapshot_csv",
    "write_diagnostics_csv",
    "smoothness_thresholds_pass",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INVALID = 4

SNAPSHOT_HEADER = "x,rho,M1,u3,u4,q1,pi11,pi22,v1,Js"

# criterion thresholds for a "smooth" shock-tube profile
MAX_EXTREMA_DENSITY_FAMILY = 3   # rho, M1, pi11, pi22
MAX_EXTREMA_HEAT_FLUX = 5        # q1


def build_model(cfg: RunConfig):
    if cfg.model == "moment13":
        return Moment13Model(cfg.params)
    return EulerModel()


def initial_field(cfg: RunConfig) -> FieldArray:
    """Piecewise-constant Riemann data in the conserved variables of the model."""
    if cfg.model == "moment13":
        u_l = to_conserved(cfg.ic.left)
        u_r = to_conserved(cfg.ic.right)
    else:
        u_l = _euler_state(cfg.ic.left).as_array()
        u_r = _euler_state(cfg.ic.right).as_array()
    return riemann_field(cfg.grid, u_l, u_r, cfg.ic.x_m)


def _euler_state(w) -> EulerState:
    # isotropic-pressure mapping p = rho * tr(pi) / 3
    p = w.rho * (w.pi11 + 2.0 * w.pi22) / 3.0
    return EulerState.from_primitive(w.rho, w.M1 / w.rho, p)


def run_config(cfg: RunConfig, *, collect: bool = True,
               snapshot_every: int | None = None) -> RunResult:
    """Run a validated configuration and return the in-memory result."""
    cfg.validate()
    model = build_model(cfg)
    closure = make_closure(None if cfg.closure == "none" else cfg.closure)
    ic = initial_field(cfg)
    return run(ic, cfg.grid, model, closure,
               snapshot_every=snapshot_every, collect=collect,
               projection=cfg.projection)


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------


def _fmt17(v: float) -> str:
    return f"{v:.17g}"


def write_snapshot_csv(path, x, u, model, js=None) -> None:
    """One snapshot row per cell; columns are fixed regardless of the model.

    Euler states are reported through their isotropic-moment equivalents
    (pi11 = pi22 = p/rho, q1 = 0) so downstream tooling sees one schema.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    if js is None:
        js = np.zeros(n)
    if u.shape[1] == 5:
        w = model.to_physical(u)
        rho, m1, pi11, pi22, q1 = (w[:, k] for k in range(5))
        u3, u4 = u[:, 2], u[:, 3]
        v1 = m1 / rho
    else:
        rho, m1, e = u[:, 0], u[:, 1], u[:, 2]
        v1 = m1 / rho
        p = (model.gamma - 1.0) * (e - 0.5 * m1 * v1)
        pi11 = pi22 = p / rho
        q1 = np.zeros(n)
        u3, u4 = e, 0.5 * p
    cols = [x, rho, m1, u3, u4, q1, pi11, pi22, v1, js]
    lines = [SNAPSHOT_HEADER]
    for i in range(n):
        lines.append(",".join(_fmt17(float(c[i])) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def read_snapshot_csv(path) -> dict[str, np.ndarray]:
    """Read a snapshot back into named columns (full printed precision)."""
    lines = Path(path).read_text().strip().splitlines()
    names = lines[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return {name: rows[:, k] for k, name in enumerate(names)}


def write_diagnostics_csv(records, path) -> None:
    if not records:
        Path(path).write_text("")
        return
    m = len(records[0].totals)
    profile_names = sorted(records[0].tv)
    header = (
        ["step", "t", "dt"]
        + [f"total_u{k + 1}" for k in range(m)]
        + ["total_entropy", "min_entropy_production"]
        + [f"tv_{n}" for n in profile_names]
        + [f"extrema_{n}" for n in profile_names]
        + ["max_abs_js", "newton_iters", "newton_max",
           "max_entropy_residual", "boundary_touched"]
    )
    lines = [",".join(header)]
    for r in records:
        row = [str(r.index), _fmt17(r.t), _fmt17(r.dt)]
        row += [_fmt17(v) for v in r.totals]
        row += [_fmt17(r.entropy_total), _fmt17(r.min_entropy_production)]
        row += [_fmt17(r.tv[n]) for n in profile_names]
        row += [str(r.extrema[n]) for n in profile_names]
        row += [
            _fmt17(r.max_abs_js), str(r.newton_iters), str(r.newton_max),
            _fmt17(r.max_entropy_residual), str(int(r.boundary_touched)),
        ]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_gnuplot(path, csv_name: str) -> None:
    script = f"""# render the final profiles from {csv_name}
set datafile separator ','
set terminal pngcairo size 1200,900
set output 'profiles.png'
set multiplot layout 3,2 title 'shock tube profiles'
set key off
plot '{csv_name}' skip 1 using 1:2 with points pt 7 ps 0.3 title 'rho'
plot '{csv_name}' skip 1 using 1:3 with points pt 7 ps 0.3 title 'M1'
plot '{csv_name}' skip 1 using 1:7 with points pt 7 ps 0.3 title 'pi11'
plot '{csv_name}' skip 1 using 1:8 with points pt 7 ps 0.3 title 'pi22'
plot '{csv_name}' skip 1 using 1:6 with lines title 'q1'
plot '{csv_name}' skip 1 using 1:10 with lines title 'Js'
unset multiplot
"""
    Path(path).write_text(script)


def _write_kv(path, pairs: dict) -> None:
    lines = [f"{k} = {_fmt17(v) if isinstance(v, float) else v}" for k, v in pairs.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def run_and_report(cfg: RunConfig, out_dir: str | None = None) -> int:
    """Run a configuration and write snapshots, diagnostics, and a plot script.

    Returns a process exit code: 0 success, 2 configuration error, 3 solver
    failure, 4 invalid state.
    """
    try:
        cfg = cfg.validate()
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(cfg)
    x = cfg.grid.cell_centers
    ic = initial_field(cfg)
    stride = None
    if cfg.snapshots > 0 and cfg.grid.t_end > 0:
        n_steps = max(1, int(np.ceil(cfg.grid.t_end / cfg.grid.dt - 1e-12)))
        stride = max(1, n_steps // cfg.snapshots)
    if "csv" in cfg.formats:
        write_snapshot_csv(out / "snapshot_0000.csv", x, ic.interior, model)
    try:
        result = run_config(cfg, snapshot_every=stride)
    except SolverDivergence as err:
        print(f"solver failure: {err} (t={getattr(err, 'sim_time', float('nan')):.6g})",
              file=sys.stderr)
        return EXIT_SOLVER
    except InvalidState as err:
        print(f"invalid state: {err} (t={getattr(err, 'sim_time', float('nan')):.6g})",
              file=sys.stderr)
        return EXIT_INVALID

    if "csv" in cfg.formats:
        for k, (t_snap, fld) in enumerate(result.snapshots):
            if t_snap == 0.0:
                continue
            js = _interior_js(result, fld) if t_snap == result.t else None
            write_snapshot_csv(out / f"snapshot_{k:04d}.csv", x, fld.interior, model, js)
        write_snapshot_csv(out / "final.csv", x, result.final.interior, model,
                           _interior_js(result, result.final))
        write_diagnostics_csv(result.steps, out / "diagnostics.csv")
    if "gnuplot" in cfg.formats:
        _write_gnuplot(out / "plot.gp", "final.csv")
    summary = {
        "completed": 1,
        "t_end": float(result.t),
        "steps": len(result.steps) - 1 if result.steps else 0,
        "newton_iters": result.newton_iters,
        "wall_time_s": float(result.wall_time),
    }
    if result.steps:
        last = result.steps[-1]
        for name, count in sorted(last.extrema.items()):
            summary[f"extrema_{name}"] = count
    _write_kv(out / "summary.txt", summary)
    return EXIT_OK


def _interior_js(result: RunResult, fld: FieldArray) -> np.ndarray | None:
    if result.js_primal is None:
        return None
    g = fld.ghost
    return result.js_primal[g:-g]


# ---------------------------------------------------------------------------
# closure comparison and stability scan
# ---------------------------------------------------------------------------


def smoothness_thresholds_pass(record) -> bool:
    """Case-2 style smoothness predicate on a final-step diagnostics record."""
    ex = record.extrema
    return (
        ex.get("pi22", 0) <= MAX_EXTREMA_HEAT_FLUX
        and ex.get("q1", 0) <= MAX_EXTREMA_HEAT_FLUX
    )


def _try_run(cfg: RunConfig) -> tuple[RunResult | None, str]:
    try:
        return run_config(cfg), ""
    except (SolverDivergence, InvalidState) as err:
        return None, f"{type(err).__name__}: {err}"


def compare_closures(cfg: RunConfig, out_dir: str | None = None) -> dict:
    """Run the naive and entropic closures on identical data, side by side.

    Emits a combined CSV and a key = value summary with spurious-extrema
    counts, total variation, and shock-front positions. A failed run is
    recorded while the comparison is still emitted for the survivor.
    """
    if cfg.model != "moment13":
        raise ConfigError("closure comparison applies to the moment13 model")
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(cfg)
    x = cfg.grid.cell_centers

    runs: dict[str, RunResult | None] = {}
    notes: dict[str, str] = {}
    for label, closure in (("naive", "naive"), ("entropic", "entropic-scalar")):
        runs[label], notes[label] = _try_run(with_closure(cfg, closure))

    summary: dict[str, object] = {"t_end": cfg.grid.t_end, "n": cfg.grid.n,
                                  "lambda": cfg.grid.lam}
    profiles: dict[str, dict[str, np.ndarray]] = {}
    for label, res in runs.items():
        summary[f"{label}_completed"] = int(res is not None)
        if res is None:
            summary[f"{label}_error"] = notes[label]
            continue
        prof = model.profiles(res.final.interior)
        profiles[label] = prof
        for name, p in prof.items():
            summary[f"{label}_extrema_{name}"] = diag.spurious_extrema_count(p)
            summary[f"{label}_tv_{name}"] = diag.total_variation(p)
        summary[f"{label}_front"] = diag.shock_front_position(x, prof["rho"])
        summary[f"{label}_smooth"] = int(smoothness_thresholds_pass(res.steps[-1]))

    if profiles:
        names = ("rho", "M1", "pi11", "pi22", "q1")
        header = ["x"]
        cols = [x]
        for label in sorted(profiles):
            for name in names:
                header.append(f"{name}_{label}")
                cols.append(profiles[label][name])
        lines = [",".join(header)]
        for i in range(len(x)):
            lines.append(",".join(_fmt17(float(c[i])) for c in cols))
        (out / "comparison.csv").write_text("\n".join(lines) + "\n")
    _write_kv(out / "comparison_summary.txt", summary)
    return summary


def stability_scan(cfg: RunConfig, lam_grid=None, out_dir: str | None = None) -> dict:
    """Bisect a fixed lambda grid for a point where the closures separate.

    Looks for the largest grid lambda at which the entropic run still meets the
    smoothness thresholds while the naive run does not (failing = exceeding the
    thresholds or aborting). Returns the evaluations and the found lambda.
    """
    if lam_grid is None:
        lam_grid = np.linspace(0.025, 0.2, 6)
    lam_grid = np.asarray(sorted(lam_grid), dtype=float)
    evaluations = {}

    def assess(lam: float) -> tuple[bool, bool]:
        if lam in evaluations:
            return evaluations[lam]["entropic_ok"], evaluations[lam]["naive_ok"]
        g = cfg.grid
        scaled = RunConfig(
            model=cfg.model, closure=cfg.closure,
            grid=type(g)(n=g.n, lam=float(lam), t_end=g.t_end, x_lo=g.x_lo, x_hi=g.x_hi),
            params=cfg.params, ic=cfg.ic, out_dir=cfg.out_dir,
            snapshots=0, formats=cfg.formats, projection=cfg.projection,
        )
        verdict = {}
        for label, closure in (("entropic", "entropic-scalar"), ("naive", "naive")):
            res, note = _try_run(with_closure(scaled, closure))
            verdict[f"{label}_ok"] = bool(res is not None
                                          and smoothness_thresholds_pass(res.steps[-1]))
            verdict[f"{label}_note"] = note
        evaluations[lam] = verdict
        return verdict["entropic_ok"], verdict["naive_ok"]

    lo, hi = 0, len(lam_grid) - 1
    found = None
    while lo <= hi:
        mid = (lo + hi) // 2
        entropic_ok, naive_ok = assess(float(lam_grid[mid]))
        if entropic_ok and not naive_ok:
            found = float(lam_grid[mid])
            lo = mid + 1      # look for an even larger workable lambda
        elif entropic_ok:
            lo = mid + 1      # naive still fine here; separation is higher up
        else:
            hi = mid - 1      # entropic broke too; back off
    report: dict[str, object] = {"found_lambda": found if found is not None else "none"}
    for lam in sorted(evaluations):
        v = evaluations[lam]
        report[f"entropic_ok_at_{lam:.6g}"] = int(v["entropic_ok"])
        report[f"naive_ok_at_{lam:.6g}"] = int(v["naive_ok"])
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_kv(out / "stability_scan.txt", report)
    report["evaluations"] = evaluations
    return report
