"""Command-line entry point.

Every subcommand writes its results under ``--out`` and a ``checks.csv``
with one row per check. Exit status is 0 on success, 1 when a check fails
and 2 for usage, configuration or IO errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .acceptance import CheckResult, read_checks_csv, write_checks_csv
from .barriers import (
    BarrierSpec,
    quench_bounds,
    stationary_residual,
    subsolution_step_deficit,
    supersolution_step_excess,
)
from .config import ExperimentConfig, load_config
from .errors import MonotonicityViolation, NoData, QuenchlabError
from .estimators import bernstein_sample
from .grid import write_field_csv
from .params import general_barrier_constant, stationary_constant
from .quenching import energy_check, write_free_boundary_csv
from .solver import DiagnosticsSeries, RunResult, max_stable_dt, run, sweep_limit

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _row(name, ok, measured, bound, tol=0.0, detail="") -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", float(measured), float(bound), float(tol), detail)


def _out_dir(args, cfg: ExperimentConfig | None) -> Path:
    if args.out:
        return Path(args.out)
    return Path(cfg.outputs.csv_dir if cfg else "out")


def _write_run(result: RunResult, out: Path, svg: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    result.series.to_csv(out / "series.csv")
    snap_dir = out / "snapshots"
    for i, s in enumerate(result.snapshots):
        write_field_csv(s, snap_dir / f"u_{i:04d}.csv")
    write_free_boundary_csv(result, out / "free_boundary.csv", result.config.support_tol)
    if svg:
        from .plotting import plot_all_series, plot_snapshots

        plot_all_series(result.series, out / "svg")
        plot_snapshots(result, out / "svg" / "snapshots.svg")


def _finish(results: list[CheckResult], out: Path) -> int:
    write_checks_csv(results, out / "checks.csv")
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.status != "fail" for r in results) else EXIT_FAIL


def _l1_zeta_row(result: RunResult) -> CheckResult:
    s = result.series
    ref = s.l1_zeta[0]
    excess = float(np.max(s.l1_zeta + s.absorbed_mass_cum - ref)) / ref if ref > 0 else 0.0
    return _row("l1_zeta_contraction", excess <= 1e-6, excess, 0.0, 1e-6, "relative excess")


def cmd_run(args, cfg: ExperimentConfig) -> int:
    out = _out_dir(args, cfg)
    u0 = cfg.initial_field()
    result = run(u0, cfg.run_config(), cfg.model)
    _write_run(result, out, cfg.outputs.svg)
    rows = []
    # boundary inflow breaks the contraction when the data are not small
    if cfg.sim.boundary_mode in ("zero", "lifted_eta"):
        rows.append(_l1_zeta_row(result))
    if cfg.initial.kind == "stationary_profile" and cfg.sim.boundary_mode == "unit":
        drift = float(np.abs(result.values() - u0.values).max())
        rows.append(_row("stationary_drift", drift <= args.drift_tol, drift, args.drift_tol,
                         detail=f"K={stationary_constant(cfg.model):.6g}"))
    print(f"steps={result.steps_taken} quench_time={result.quench_time}")
    return _finish(rows, out)


def cmd_sweep(args, cfg: ExperimentConfig) -> int:
    out = _out_dir(args, cfg)
    u0 = cfg.initial_field()
    base = cfg.run_config()
    try:
        sw = sweep_limit(u0, base, cfg.model, list(cfg.ladder) or None, mono_tol=args.mono_tol,
                         jobs=args.jobs)
    except MonotonicityViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _finish([_row("sweep_monotone", False, exc.gap, args.mono_tol, detail=str(exc))], out)
    for k, r in enumerate(sw.runs):
        _write_run(r, out / f"rung_{k:02d}", cfg.outputs.svg)
    with open(out / "gaps.csv", "w") as fh:
        fh.write("pair,l1_gap,max_gap_sup\n")
        for k, (g, s) in enumerate(zip(sw.l1_gaps, sw.max_gap_sup)):
            fh.write(f"{k},{g:.17g},{s:.17g}\n")
    gaps = sw.l1_gaps
    nonincreasing = all(b <= a for a, b in zip(gaps, gaps[1:]))
    rows = [_row("sweep_monotone", True, sw.worst_violation, args.mono_tol),
            _row("sweep_gaps_nonincreasing", nonincreasing, gaps[-1] if gaps else 0.0,
                 gaps[0] if gaps else 0.0, detail=" ".join(f"{g:.4e}" for g in gaps))]
    return _finish(rows, out)


def cmd_verify_barriers(args, cfg: ExperimentConfig) -> int:
    out = _out_dir(args, cfg)
    p = cfg.model
    grid = cfg.grid()
    # the steady profile is singular at the centre of a ball or the left end of an interval
    x0 = 0.0 if grid.is_ball else grid.domain.a
    collar = args.collar * grid.domain.length
    rows = []
    k = stationary_constant(p)
    res = stationary_residual(BarrierSpec.u_stationary(k, x0), grid, p, collar)
    rows.append(_row("stationary_residual", res.discrete_sup_residual <= args.residual_tol,
                     res.discrete_sup_residual, args.residual_tol, detail=f"K={k:.6g}"))
    lo = stationary_residual(BarrierSpec.u_stationary(k / 2, x0), grid, p).operator_values
    hi = stationary_residual(BarrierSpec.u_stationary(2 * k, x0), grid, p).operator_values
    rows.append(_row("stationary_sub_sign", lo.min() > 0, lo.min(), 0.0, detail="K/2 gives a subsolution"))
    rows.append(_row("stationary_super_sign", hi.max() < 0, hi.max(), 0.0, detail="2K gives a supersolution"))

    sim = cfg.sim
    sup = float(cfg.initial_field(grid).values.max()) or 1.0
    q = args.q
    qb = quench_bounds(p, sup, q)
    cu = general_barrier_constant(p.n_dim, q, qb.lambda_used)
    spec_u = BarrierSpec.U_super(q, cu, sup, qb.lambda_used, x0=x0)
    lam_w = 0.5 * p.lam
    spec_w = BarrierSpec.W_sub(stationary_constant(p.with_lambda(lam_w)), 0.5 * sup, lam_w, x0=x0)
    dt = 0.5 * max_stable_dt(grid, p, sim, 2.0 * sup, 0.0)
    if math.isinf(dt):
        dt = 1e-3
    worst_u = max(supersolution_step_excess(spec_u, grid, p, sim, t, dt) for t in (0.0, 0.25 * qb.tau_barrier))
    worst_w = subsolution_step_deficit(spec_w, grid, p, sim, 0.0, dt)
    rows.append(_row("supersolution_step", worst_u <= args.step_tol, worst_u, args.step_tol))
    rows.append(_row("subsolution_step", worst_w <= args.step_tol, worst_w, args.step_tol))
    return _finish(rows, out)


def cmd_verify_bernstein(args, cfg) -> int:
    out = _out_dir(args, cfg)
    dims = [args.n_dim] if args.n_dim else [2, 3]
    rows = []
    for n in dims:
        res = bernstein_sample(n, args.trials, args.seed)
        print(f"N={n} min_slack={res.min_slack:.6e}")
        rows.append(_row(f"bernstein_n{n}", res.min_slack >= -1e-9, res.min_slack, -1e-9,
                         detail=f"trials={args.trials} seed={args.seed}"))
    return _finish(rows, out)


def cmd_quench(args, cfg: ExperimentConfig) -> int:
    out = _out_dir(args, cfg)
    p = cfg.model
    u0 = cfg.initial_field()
    result = run(u0, cfg.run_config(), p)
    _write_run(result, out, cfg.outputs.svg)
    qt = result.quench_time
    measured = math.inf if qt is None else qt
    qb = quench_bounds(p, float(u0.values.max()), args.q)
    rows = [_row("quench_barrier", qt is not None and qt <= qb.tau_barrier, measured, qb.tau_barrier,
                 detail=f"q={args.q}")]
    eq = args.energy_q if args.energy_q is not None else max(p.beta + 2.0, 2.5)
    rep = energy_check(result, p, eq)
    rows.append(_row("energy_inequality",
                     rep.ode_violations == 0 and qt is not None and qt <= rep.extinction_bound * 1.1,
                     measured, rep.extinction_bound, 0.1,
                     f"sigma={rep.sigma:.5f} C={rep.fitted_C:.4g} violations={rep.ode_violations}"))
    if cfg.sim.boundary_mode in ("zero", "lifted_eta"):
        rows.append(_l1_zeta_row(result))
    return _finish(rows, out)


def cmd_report(args, cfg) -> int:
    out = _out_dir(args, cfg)
    src = Path(args.directory) if args.directory else out
    if args.acceptance:
        write_checks_csv(acceptance.run_all(echo=print), src / "acceptance" / "checks.csv")
    check_files = sorted(src.rglob("checks.csv")) if src.is_dir() else []
    series_files = sorted(src.rglob("series.csv")) if src.is_dir() else []
    if not check_files and not series_files:
        raise NoData(f"no checks.csv or series.csv under {src}")
    merged: dict[str, CheckResult] = {}
    for f in check_files:
        for r in read_checks_csv(f):
            prev = merged.get(r.name)
            # a failure anywhere wins over a pass elsewhere
            if prev is None or r.status == "fail":
                merged[r.name] = r
    for f in series_files:
        s = DiagnosticsSeries.from_csv(f)
        if len(s) < 2:
            continue
        from .plotting import plot_all_series

        plot_all_series(s, out / "report_svg" / f.parent.relative_to(src), args.loglog or ("grad_gamma_sup",))
    rows = [merged[k] for k in sorted(merged)]
    write_checks_csv(rows, out / "report.csv")
    n_fail = sum(r.status == "fail" for r in rows)
    for r in rows:
        print(r.line())
    print(f"{len(rows)} checks, {n_fail} failed")
    return EXIT_OK if n_fail == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value experiment file")
    common.add_argument("--out", help="output directory (default: outputs.csv_dir)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")

    ap = argparse.ArgumentParser(prog="quenchlab", description="Quenching porous-medium experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="one simulation")
    p.add_argument("--drift-tol", type=float, default=5e-3)
    p = sub.add_parser("sweep", parents=[common], help="eps/eta or radius ladder")
    p.add_argument("--mono-tol", type=float, default=1e-8)
    p = sub.add_parser("verify-barriers", parents=[common], help="steady state and barrier checks")
    p.add_argument("--q", type=float, default=0.5, help="exponent of the U barrier")
    p.add_argument("--residual-tol", type=float, default=1e-2)
    p.add_argument("--collar", type=float, default=0.1,
                   help="excluded neighbourhood of the singular point, as a fraction of the domain")
    p.add_argument("--step-tol", type=float, default=1e-10)
    p = sub.add_parser("verify-bernstein", parents=[common], help="sample the pointwise identity")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--n-dim", type=int, default=None)
    p = sub.add_parser("quench", parents=[common], help="quenching run against the bounds")
    p.add_argument("--q", type=float, default=0.5, help="exponent of the U barrier")
    p.add_argument("--energy-q", type=float, default=None)
    p = sub.add_parser("report", parents=[common], help="aggregate checks and plot series")
    p.add_argument("directory", nargs="?", help="directory to scan (default: --out)")
    p.add_argument("--acceptance", action="store_true", help="run the acceptance checks first")
    p.add_argument("--loglog", nargs="*", default=None, metavar="COLUMN",
                   help="series columns drawn on log-log axes")
    return ap


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "verify-barriers": cmd_verify_barriers,
    "verify-bernstein": cmd_verify_bernstein,
    "quench": cmd_quench,
    "report": cmd_report,
}
NEEDS_CONFIG = {"run", "sweep", "verify-barriers", "quench"}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config) if args.config else None
        if cfg is None and args.command in NEEDS_CONFIG:
            print(f"error: {args.command} needs --config", file=sys.stderr)
            return EXIT_USAGE
        return COMMANDS[args.command](args, cfg)
    except (QuenchlabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
