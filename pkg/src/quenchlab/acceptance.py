"""The acceptance checks, one function per criterion.

Each check builds its own scenario, runs it and returns a
:class:`CheckResult`; :func:`run_all` evaluates a selection.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .barriers import (
    BarrierSpec,
    normalizing_lambda,
    quench_bounds,
    sharpness_ratios,
    stationary_residual,
)
from .errors import MonotonicityViolation
from .estimators import bernstein_sample, check_gradient_bounds, grad_cauchy_metric, smoothing_fit
from .grid import Domain, Field, Grid, gradient_power_sup
from .initial import bump
from .params import ModelParams, general_barrier_constant, stationary_constant
from .quenching import dead_core_check, dead_core_radius, energy_check
from .solver import SimConfig, run, sweep_limit

CHECK_COLUMNS = ("check_name", "status", "measured", "bound", "tolerance", "detail")


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # pass | fail | not_applicable
    measured: float
    bound: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def line(self) -> str:
        tag = {"pass": "PASS", "fail": "FAIL"}.get(self.status, "N/A ")
        return (f"[{tag}] {self.name}: measured={self.measured:.6g} bound={self.bound:.6g} "
                f"tol={self.tolerance:.3g} ({self.seconds:.1f}s) {self.detail}")


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def stationary_identity() -> CheckResult:
    """Residual of the exact steady state under refinement, plus sign tests."""
    p = ModelParams(1.0, 0.5, 2)
    k = stationary_constant(p)
    cells = (128, 256, 512)
    collar = 3.0 / cells[0]  # 3h of the coarsest grid, held fixed across the study
    grids = [Grid(Domain.ball(1.0, 2), n) for n in cells]
    res = [stationary_residual(BarrierSpec.u_stationary(k), g, p, collar).discrete_sup_residual for g in grids]
    ratios = [a / b for a, b in zip(res, res[1:])]
    signs_ok = True
    for g in grids:
        lo = stationary_residual(BarrierSpec.u_stationary(k / 2), g, p)
        hi = stationary_residual(BarrierSpec.u_stationary(2 * k), g, p)
        signs_ok &= bool(np.all(lo.operator_values > 0) and np.all(hi.operator_values < 0))
    ok = all(1.8 <= r <= 4.5 for r in ratios) and signs_ok
    return CheckResult("stationary_identity", _status(ok), min(ratios), 1.8, 4.5,
                       f"K={k:.6f} residuals={[f'{r:.3e}' for r in res]} ratios="
                       f"{[round(r, 3) for r in ratios]} signs_ok={signs_ok}")


STEADY_PARAMS = ModelParams(1.0, 0.1, 4)


def steady_state_persistence() -> CheckResult:
    """Unit-boundary run from the steady profile on the unit ball stays put."""
    p0 = STEADY_PARAMS
    p = p0.with_lambda(normalizing_lambda(p0))
    k = stationary_constant(p)
    g = Grid(Domain.ball(1.0, p.n_dim), 512)
    u0 = Field(g, k ** (1.0 / p.m) * g.nodes ** (2.0 / (p.m + p.beta)))
    r = run(u0, SimConfig(eps=1e-9, boundary_mode="unit", t_end=0.5, n_records=50, cfl_safety=0.9), p)
    dev = float(np.abs(r.values() - u0.values).max())
    return CheckResult("steady_state_persistence", _status(dev <= 5e-3), dev, 5e-3, 0.0,
                       f"N={p.n_dim} m={p.m} beta={p.beta} lambda={p.lam:.6f} K={k:.6f}")


def universal_gradient_bound() -> CheckResult:
    p = ModelParams(1.0, 0.5, 2)
    g = Grid(Domain.ball(1.0, 2), 256)
    u0 = Field(g, (0.5 * (1.0 - g.nodes**2)) ** (4.0 / 3.0))
    g0 = gradient_power_sup(u0, 0.75)
    r = run(u0, SimConfig(eps=1e-9, boundary_mode="zero", t_end=0.5, n_records=100), p)
    rep = check_gradient_bounds(r, p, g0, bound_tol=0.05)
    measured = float(r.series.grad_gamma_sup.max())
    ok = bool(rep.universal_ok) and measured <= 1.5 * 1.05
    return CheckResult("universal_gradient_bound", _status(ok), measured, 1.5, 0.05,
                       f"u0_grad={g0:.4f} universal={rep.universal_bound} quench={r.quench_time}")


def sharpness() -> CheckResult:
    """Critical exponent is h-stable; the larger one must grow under halving."""
    p = STEADY_PARAMS
    crit = (p.m + p.beta) / 2.0
    cells = [128, 256, 512]
    stable = sharpness_ratios(p, crit, cells)
    above = sharpness_ratios(p, crit + 0.25, cells)
    variation = max(abs(r - 1.0) for r in stable)
    growth = min(above)
    ok = variation < 0.05 and growth >= 1.5
    return CheckResult("sharpness", _status(ok), growth, 1.5, 0.05,
                       f"critical ratios={[round(r, 4) for r in stable]} "
                       f"larger-exponent ratios={[round(r, 4) for r in above]}")


def quench_barrier() -> CheckResult:
    p = ModelParams(1.2, 0.5, 1)
    g = Grid(Domain.interval(0.0, 1.0), 256)
    u0 = bump(g, 0.5, 0.5, 0.5)
    ladder = [(1e-2, 1e-2), (1e-4, 1e-4), (1e-6, 1e-6), (1e-8, 1e-8), (1e-11, 1e-11)]
    sw = sweep_limit(u0, SimConfig(t_end=0.5, n_records=50), p, ladder)
    last = sw.runs[-1]
    qb = quench_bounds(p, float(u0.values.max()), 0.5)
    dt = last.config.dt or 0.0
    qt = last.quench_time
    ok = qt is not None and qt <= qb.tau_barrier + dt
    return CheckResult("quench_barrier", _status(ok), math.inf if qt is None else qt,
                       qb.tau_barrier, dt, f"lambda={qb.lambda_used:.4g} rungs={len(ladder)}")


def exact_absorption() -> CheckResult:
    p = ModelParams(1.0, 0.5, 1)
    g = Grid(Domain.interval(0.0, 1.0), 8)
    u0 = Field(g, np.ones(g.n_nodes))
    dt = 1e-5
    times = tuple(np.round(np.linspace(0.0, 0.8, 81), 12))
    r = run(u0, SimConfig(eps=1e-12, boundary_mode="zero", diffusion=False, dt=dt, t_end=0.8,
                          record_times=times), p)
    exact = np.maximum(1.0 - 1.5 * r.series.t, 0.0) ** (2.0 / 3.0)
    err = float(np.abs(r.values()[:, g.interior] - exact[:, None]).max())
    qt = r.quench_time
    ext_ok = qt is not None and abs(qt - 2.0 / 3.0) <= dt
    return CheckResult("exact_absorption", _status(err <= 1e-6 and ext_ok), err, 1e-6, dt,
                       f"quench_time={qt}")


def monotone_eps_limit() -> CheckResult:
    p = ModelParams(1.0, 0.5, 1)
    g = Grid(Domain.interval(0.0, 1.0), 256)
    u0 = bump(g, 0.5, 0.5, 0.5)
    sup0 = float(u0.values.max())
    ladder = [(e, min(e, sup0)) for e in (0.2, 0.1, 0.05)]
    try:
        sw = sweep_limit(u0, SimConfig(t_end=0.3, n_records=60), p, ladder, mono_tol=1e-8)
    except MonotonicityViolation as exc:
        return CheckResult("monotone_eps_limit", "fail", exc.gap, 1e-8, 0.0, str(exc))
    gaps = sw.l1_gaps
    ok = all(b <= a for a, b in zip(gaps, gaps[1:]))
    return CheckResult("monotone_eps_limit", _status(ok), sw.worst_violation, 1e-8, 0.0,
                       f"l1_gaps={[f'{x:.4e}' for x in gaps]}")


def l1_zeta_contraction() -> CheckResult:
    p = ModelParams(1.2, 0.5, 1)
    g = Grid(Domain.interval(0.0, 1.0), 256)
    u0 = bump(g, 0.5, 0.5, 0.5)
    worst = -math.inf
    for cfg in (SimConfig(eps=1e-11, boundary_mode="zero", t_end=0.3, n_records=60),
                SimConfig(eps=0.05, eta=0.05, boundary_mode="lifted_eta", t_end=0.3, n_records=60)):
        s = run(u0, cfg, p).series
        worst = max(worst, float(np.max((s.l1_zeta + s.absorbed_mass_cum - s.l1_zeta[0]) / s.l1_zeta[0])))
    return CheckResult("l1_zeta_contraction", _status(worst <= 1e-6), worst, 0.0, 1e-6,
                       "relative excess, zero and lifted boundary")


def bernstein() -> CheckResult:
    res = [bernstein_sample(n, 10_000, 42) for n in (2, 3)]
    worst = min(r.min_slack for r in res)
    return CheckResult("bernstein", _status(worst >= -1e-9), worst, -1e-9, 0.0,
                       f"min relative slack N=2: {res[0].min_slack:.3e}, N=3: {res[1].min_slack:.3e}")


def pme_smoothing() -> CheckResult:
    p = ModelParams(2.0, 0.5, 1)
    g = Grid(Domain.interval(0.0, 1.0), 1024)
    u0 = Field(g, 100.0 * np.sin(np.pi * g.nodes))
    times = tuple(np.geomspace(0.01, 0.1, 20))
    r = run(u0, SimConfig(boundary_mode="zero", absorption=False, t_end=0.1, record_times=times,
                          cfl_safety=0.9), p)
    fit = smoothing_fit(r, p, (0.01, 0.1))
    rel = abs(fit.fitted_decay - fit.expected) / abs(fit.expected)
    return CheckResult("pme_smoothing", _status(rel <= 0.15), fit.fitted_decay, fit.expected, 0.15,
                       "initial data 100 sin(pi x)")


def gradient_cauchy() -> CheckResult:
    p = ModelParams(1.0, 0.5, 1)
    g = Grid(Domain.interval(0.0, 1.0), 256)
    u0 = bump(g, 0.5, 0.5, 0.5)
    eps = (0.2, 0.1, 0.05, 0.025, 0.0125)
    sw = sweep_limit(u0, SimConfig(t_end=0.3, n_records=60), p, [(e, e) for e in eps])
    window = (0.05, 0.3)
    mets = [grad_cauchy_metric(a, b, window) for a, b in zip(sw.runs, sw.runs[1:])]
    frac = mets[-1] / mets[0]
    ok = all(b < a for a, b in zip(mets, mets[1:])) and frac < 0.1
    return CheckResult("gradient_cauchy", _status(ok), frac, 0.1, 0.0,
                       f"metrics={[f'{x:.3e}' for x in mets]} window={window}")


def dead_core() -> CheckResult:
    p = ModelParams(1.0, 0.5, 1)
    q = -p.beta / p.m
    k = general_barrier_constant(1, q, p.lam)
    rad = dead_core_radius(p)
    g = Grid(Domain.interval(-1.0, 1.0), 256)
    x = g.nodes
    u0 = Field(g, np.minimum(0.5 * k * np.abs(x) ** (2.0 / (1.0 - q)), 0.5))
    r = run(u0, SimConfig(eps=1e-12, boundary_mode="zero", t_end=0.5, n_records=50), p)
    i0 = int(np.argmin(np.abs(x)))
    worst = float(max(s.values[i0] for s in r.snapshots[1:]))
    ok = dead_core_check(r, 0.0, 1e-10) and 1.0 >= rad.used
    return CheckResult("dead_core", _status(ok), worst, 1e-10, 0.0,
                       f"K={k:.4f} radius_needed={rad.used:.4f} distance=1")


def energy_inequality() -> CheckResult:
    p = ModelParams(1.0, 0.5, 3)
    g = Grid(Domain.ball(1.0, 3), 256)
    u0 = Field(g, 0.5 * (1.0 - g.nodes**2))
    r = run(u0, SimConfig(eps=1e-12, boundary_mode="zero", t_end=0.5, n_records=200), p)
    e = energy_check(r, p, 2.5, ode_tol=0.05)
    qt = r.quench_time
    ok = e.ode_violations == 0 and qt is not None and qt <= e.extinction_bound * 1.1
    return CheckResult("energy_inequality", _status(ok), math.inf if qt is None else qt,
                       e.extinction_bound, 0.1,
                       f"sigma={e.sigma:.5f} C={e.fitted_C:.4g} violations={e.ode_violations}")


CRITERIA: dict[str, Callable[[], CheckResult]] = {
    "stationary_identity": stationary_identity,
    "steady_state_persistence": steady_state_persistence,
    "universal_gradient_bound": universal_gradient_bound,
    "sharpness": sharpness,
    "quench_barrier": quench_barrier,
    "exact_absorption": exact_absorption,
    "monotone_eps_limit": monotone_eps_limit,
    "l1_zeta_contraction": l1_zeta_contraction,
    "bernstein": bernstein,
    "pme_smoothing": pme_smoothing,
    "gradient_cauchy": gradient_cauchy,
    "dead_core": dead_core,
    "energy_inequality": energy_inequality,
}


def evaluate(name: str) -> CheckResult:
    t0 = time.perf_counter()
    res = CRITERIA[name]()
    return CheckResult(res.name, res.status, res.measured, res.bound, res.tolerance, res.detail,
                       time.perf_counter() - t0)


def run_all(names=None, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    out = []
    for name in names or CRITERIA:
        res = evaluate(name)
        if echo:
            echo(res.line())
        out.append(res)
    return out


def write_checks_csv(results, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CHECK_COLUMNS)
        for r in results:
            w.writerow([r.name, r.status, f"{r.measured:.17g}", f"{r.bound:.17g}",
                        f"{r.tolerance:.17g}", r.detail])


def read_checks_csv(path) -> list[CheckResult]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CHECK_COLUMNS:
        raise ValueError(f"{path}: not a checks file")
    return [CheckResult(r[0], r[1], float(r[2]), float(r[3]), float(r[4]), r[5]) for r in rows[1:]]
