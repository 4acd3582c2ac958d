"""Time integration of the regularized problem and its limit ladders.

The diffusion substep is forward Euler on ``v = u^m``; the absorption
substep integrates ``u' = -lam g_eps(u)`` node by node (see
:func:`quenchlab._kernels.absorb_exact`).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import (
    CflViolation,
    InvalidParameters,
    MaxStepsExceeded,
    MonotonicityViolation,
    NewtonDivergence,
)
from .grid import Domain, Field, Grid, WeightField, gradient_power_sup, solve_zeta
from .params import ModelParams

BOUNDARY_MODES = ("lifted_eta", "unit", "zero", "cauchy")
SCHEMES = ("lie_split", "explicit")


@dataclass(frozen=True)
class SimConfig:
    eps: float = 0.05
    eta: float | None = None  # None: min(eps, sup u0) in the lifted modes
    boundary_mode: str = "lifted_eta"
    scheme: str = "lie_split"
    t_end: float = 1.0
    cfl_safety: float = 0.25
    quench_tol: float = 1e-10
    max_steps: int = 50_000_000
    dt: float | None = None  # fixed step; adaptive when None
    n_records: int = 100
    record_times: tuple[float, ...] | None = None
    r_ladder: tuple[float, ...] = ()
    diffusion: bool = True
    absorption: bool = True
    lq_power: float = 2.0
    support_tol: float = 1e-10

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidParameters(f"eps must be > 0, got {self.eps}")
        if self.eta is not None:
            if self.eta < 0:
                raise InvalidParameters(f"eta must be >= 0, got {self.eta}")
            if self.boundary_mode in ("lifted_eta", "cauchy") and self.eta > self.eps:
                raise InvalidParameters(f"eta={self.eta} exceeds eps={self.eps}")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise InvalidParameters(f"unknown boundary mode {self.boundary_mode!r}")
        if self.scheme not in SCHEMES:
            raise InvalidParameters(f"unknown scheme {self.scheme!r}")
        if not self.t_end > 0:
            raise InvalidParameters(f"t_end must be > 0, got {self.t_end}")
        if not 0 < self.cfl_safety <= 1:
            raise InvalidParameters(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.quench_tol >= 0:
            raise InvalidParameters("quench_tol must be >= 0")
        if self.max_steps < 1:
            raise InvalidParameters("max_steps must be >= 1")
        if self.dt is not None and not self.dt > 0:
            raise InvalidParameters(f"dt must be > 0, got {self.dt}")
        if self.n_records < 1:
            raise InvalidParameters("n_records must be >= 1")
        if self.record_times is not None:
            rt = tuple(float(t) for t in self.record_times)
            if any(t < 0 or t > self.t_end for t in rt):
                raise InvalidParameters("record times must lie in [0, t_end]")
            object.__setattr__(self, "record_times", rt)
        if any(r <= 0 for r in self.r_ladder):
            raise InvalidParameters("radii in r_ladder must be > 0")
        object.__setattr__(self, "r_ladder", tuple(float(r) for r in self.r_ladder))
        if self.lq_power < 1:
            raise InvalidParameters("lq_power must be >= 1")
        if not self.support_tol > 0:
            raise InvalidParameters("support_tol must be > 0")

    @property
    def lifted(self) -> bool:
        return self.boundary_mode in ("lifted_eta", "cauchy")

    def resolved_eta(self, sup_u0: float) -> float:
        if not self.lifted:
            return 0.0
        if self.eta is None:
            return min(self.eps, sup_u0)
        return self.eta

    def times(self) -> np.ndarray:
        if self.record_times is not None:
            pts = set(self.record_times) | {0.0, self.t_end}
            return np.array(sorted(pts))
        return np.linspace(0.0, self.t_end, self.n_records + 1)


SERIES_COLUMNS = (
    "t",
    "sup_u",
    "min_u_interior",
    "l1",
    "l1_zeta",
    "lq",
    "grad_gamma_sup",
    "support_measure",
    "absorbed_mass_cum",
)


@dataclass(frozen=True)
class DiagnosticsSeries:
    t: np.ndarray
    sup_u: np.ndarray
    min_u_interior: np.ndarray
    l1: np.ndarray
    l1_zeta: np.ndarray
    lq: np.ndarray
    grad_gamma_sup: np.ndarray
    support_measure: np.ndarray
    absorbed_mass_cum: np.ndarray
    lq_power: float = 2.0

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name not in SERIES_COLUMNS:
            raise KeyError(name)
        return getattr(self, name)

    def to_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SERIES_COLUMNS)
            for row in zip(*(getattr(self, c) for c in SERIES_COLUMNS)):
                w.writerow([f"{x:.17g}" for x in row])

    @classmethod
    def from_csv(cls, path, lq_power: float = 2.0) -> "DiagnosticsSeries":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if tuple(header) != SERIES_COLUMNS:
                raise ValueError(f"{path}: unexpected header {header}")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        if data.size == 0:
            data = np.zeros((0, len(SERIES_COLUMNS)))
        cols = {c: data[:, i].copy() for i, c in enumerate(SERIES_COLUMNS)}
        return cls(**cols, lq_power=lq_power)


@dataclass(frozen=True)
class RunResult:
    snapshots: list[Field]
    series: DiagnosticsSeries
    quench_time: float | None
    steps_taken: int
    params: ModelParams = field(repr=False)
    config: SimConfig = field(repr=False)
    weight: WeightField = field(repr=False)
    eta: float = 0.0

    @property
    def grid(self) -> Grid:
        return self.snapshots[0].grid

    @property
    def times(self) -> np.ndarray:
        return self.series.t

    def values(self) -> np.ndarray:
        """Snapshot values stacked as ``(n_records, n_nodes)``."""
        return np.stack([s.values for s in self.snapshots])


def _check_grid(grid: Grid, params: ModelParams) -> None:
    if grid.n_dim != params.n_dim:
        raise InvalidParameters(
            f"grid dimension {grid.n_dim} does not match n_dim={params.n_dim}"
        )


def _boundary_value(config: SimConfig, eta: float) -> float:
    return {"lifted_eta": eta, "cauchy": eta, "unit": 1.0, "zero": 0.0}[config.boundary_mode]


def cfl_coefficient(grid: Grid, params: ModelParams) -> float:
    """``h^2 / (2 N_eff m)``; the stable step is this times ``(sup u + eta)^(1-m)``."""
    n_eff = grid.n_dim if grid.is_ball else 1
    return grid.h**2 / (2.0 * n_eff * params.m)


def max_stable_dt(grid: Grid, params: ModelParams, config: SimConfig, sup_u: float, eta: float = 0.0) -> float:
    base = sup_u + eta
    coef = config.cfl_safety * cfl_coefficient(grid, params)
    if params.m == 1.0 or base <= 0.0:
        return coef if params.m == 1.0 else math.inf
    return coef * base ** (1.0 - params.m)


def _diagnostics(u: np.ndarray, grid: Grid, zeta: np.ndarray, params: ModelParams,
                 config: SimConfig) -> tuple[float, ...]:
    vol = grid.volumes
    interior = u[grid.interior]
    q = config.lq_power
    return (
        float(u.max()),
        float(interior.min()) if interior.size else math.nan,
        float(np.sum(u * vol)),
        float(np.sum(u * zeta * vol)),
        float(np.sum(u**q * vol) ** (1.0 / q)),
        gradient_power_sup(Field(grid, u), (params.m + params.beta) / 2.0),
        float(np.sum(vol[u > config.support_tol])),
    )


class _Stepper:
    """Holds the per-run arrays handed to the compiled kernel."""

    def __init__(self, grid: Grid, config: SimConfig, params: ModelParams, eta: float, zeta: np.ndarray):
        self.grid = grid
        self.config = config
        self.params = params
        self.eta = eta
        self.vol_zeta = np.ascontiguousarray(grid.volumes * zeta)
        self.coef_lo = np.ascontiguousarray(grid.coef_lo)
        self.coef_hi = np.ascontiguousarray(grid.coef_hi)
        self.is_bnd = np.ascontiguousarray(grid.boundary)
        self.cfl_coef = cfl_coefficient(grid, params)
        self.steps = 0
        self.absorbed = 0.0
        self.quench_time = -1.0

    def advance(self, u: np.ndarray, t: float, t_target: float, dt_fixed: float | None) -> float:
        c, p = self.config, self.params
        t_new, steps, absorbed, qt, status, dt = _kernels.advance(
            u,
            self.coef_lo,
            self.coef_hi,
            self.is_bnd,
            self.vol_zeta,
            float(t),
            float(t_target),
            float(dt_fixed) if dt_fixed else -1.0,
            self.cfl_coef,
            float(c.cfl_safety),
            float(self.eta),
            float(p.m),
            float(p.beta),
            float(p.lam),
            float(c.eps),
            c.scheme == "explicit",
            bool(c.diffusion),
            bool(c.absorption),
            float(c.quench_tol),
            float(self.quench_time),
            int(self.steps),
            int(c.max_steps),
            float(self.absorbed),
        )
        self.steps, self.absorbed, self.quench_time = steps, absorbed, qt
        if status == _kernels.CFL_VIOLATION:
            sup = float(u.max())
            raise CflViolation(dt, max_stable_dt(self.grid, p, c, sup, self.eta))
        if status == _kernels.NEWTON_DIVERGENCE:
            raise NewtonDivergence(
                f"absorption solve did not converge in {_kernels.NEWTON_MAX_ITER} iterations"
            )
        if status == _kernels.MAX_STEPS:
            raise MaxStepsExceeded(f"reached max_steps={c.max_steps} at t={t_new:.6g}")
        return t_new


def initial_values(u0: Field, config: SimConfig, eta: float) -> np.ndarray:
    """Initial nodal values: lifted by ``eta`` in the lifted modes, boundary set by mode."""
    u = np.array(u0.values, dtype=float)
    if config.lifted:
        u = u + eta
    u[u0.grid.boundary] = _boundary_value(config, eta)
    return u


def step(fld: Field, config: SimConfig, params: ModelParams, dt: float) -> Field:
    """One step of size ``dt`` from ``fld``; boundary nodes are set per mode first."""
    _check_grid(fld.grid, params)
    if not dt > 0:
        raise InvalidParameters("dt must be > 0")
    eta = config.resolved_eta(float(fld.values.max()))
    u = np.array(fld.values, dtype=float)
    u[fld.grid.boundary] = _boundary_value(config, eta)
    return _step_values(fld.grid, u, fld.time, config, params, dt, eta)


def step_frozen_boundary(fld: Field, config: SimConfig, params: ModelParams, dt: float) -> Field:
    """One step that keeps the boundary nodes of ``fld`` unchanged."""
    _check_grid(fld.grid, params)
    u = np.array(fld.values, dtype=float)
    return _step_values(fld.grid, u, fld.time, config, params, dt, config.eta or 0.0)


def _step_values(grid, u, t, config, params, dt, eta) -> Field:
    zeta = np.zeros(grid.n_nodes)
    st = _Stepper(grid, replace(config, quench_tol=0.0), params, eta, zeta)
    st.advance(u, t, t + dt, dt)
    return Field(grid, u, t + dt)


def run(u0: Field, config: SimConfig, params: ModelParams) -> RunResult:
    grid = u0.grid
    _check_grid(grid, params)
    if np.any(u0.values < 0):
        raise InvalidParameters("initial data must be nonnegative")
    eta = config.resolved_eta(float(u0.values.max()))
    weight = solve_zeta(grid)
    zeta = weight.zeta_values
    u = initial_values(u0, config, eta)
    times = config.times()

    st = _Stepper(grid, config, params, eta, zeta)
    if u.max() <= config.quench_tol:
        st.quench_time = 0.0

    rows = []
    snaps = []
    t = 0.0
    for target in times:
        if target > t:
            t = st.advance(u, t, target, config.dt)
        snaps.append(Field(grid, u.copy(), float(target)))
        rows.append((float(target),) + _diagnostics(u, grid, zeta, params, config) + (st.absorbed,))
    cols = np.array(rows).T
    series = DiagnosticsSeries(*cols, lq_power=config.lq_power)
    qt = st.quench_time if st.quench_time >= 0.0 else None
    return RunResult(snaps, series, qt, st.steps, params, config, weight, eta)


@dataclass(frozen=True)
class SweepResult:
    """Runs of a limit ladder (ordered as given) and the gaps between rungs."""

    runs: list[RunResult]
    l1_gaps: list[float]
    max_gap_sup: list[float]
    worst_violation: float

    def __len__(self):
        return len(self.runs)

    def __iter__(self):
        return iter(self.runs)

    def __getitem__(self, i):
        return self.runs[i]


def _time_integral(t: np.ndarray, y: np.ndarray) -> float:
    if len(t) < 2:
        return float(y[0]) if len(y) else 0.0
    return float(np.trapezoid(y, t))


def _run_job(args):
    return run(*args)


def _map_runs(jobs_args, jobs: int):
    if jobs > 1 and len(jobs_args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_job, jobs_args))
    return [_run_job(a) for a in jobs_args]


def _restrict(u0: Field, radius: float) -> Field:
    """``u0 chi_{B_R}`` sampled on a ball of radius ``radius`` with the spacing of ``u0``."""
    g0 = u0.grid
    n = max(2, int(round(radius / g0.h)))
    g = Grid(Domain.ball(radius, g0.n_dim), n)
    vals = np.interp(g.nodes, g0.nodes, u0.values, right=0.0)
    vals[g.nodes > g0.domain.radius] = 0.0
    return Field(g, vals, u0.time)


def sweep_limit(
    u0: Field,
    base: SimConfig,
    params: ModelParams,
    ladder: Sequence[tuple[float, float]] | None = None,
    mono_tol: float = 1e-8,
    jobs: int = 1,
) -> SweepResult:
    """Run the ``(eps, eta)`` ladder, or the radius ladder in cauchy mode.

    Every rung shares the record times and one fixed step size, so the
    discrete solutions can be compared node by node. Consecutive rungs must
    be ordered (finer regularization below coarser, smaller ball below
    larger) up to ``mono_tol``.
    """
    cauchy = base.boundary_mode == "cauchy"
    if cauchy:
        if not u0.grid.is_ball:
            raise InvalidParameters("cauchy mode needs a ball grid")
        radii = list(base.r_ladder)
        if not radii:
            raise InvalidParameters("cauchy mode needs a nonempty r_ladder")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise InvalidParameters("r_ladder must be strictly increasing")
        inits = [_restrict(u0, r) for r in radii]
        configs = [base for _ in radii]
        etas = [base.resolved_eta(float(f.values.max())) for f in inits]
    else:
        if not ladder:
            raise InvalidParameters("ladder must be nonempty")
        for (e1, _), (e2, _) in zip(ladder, ladder[1:]):
            if not e2 < e1:
                raise InvalidParameters("ladder eps must be strictly decreasing")
        for e, n in ladder:
            if n > e:
                raise InvalidParameters(f"eta={n} exceeds eps={e} in ladder")
        inits = [u0 for _ in ladder]
        configs = [replace(base, eps=e, eta=n) for e, n in ladder]
        etas = [c.resolved_eta(float(u0.values.max())) for c in configs]

    dt = base.dt
    if dt is None and base.diffusion:
        sup0 = max(float(f.values.max()) for f in inits)
        eta_max = max(etas)
        dt = min(max_stable_dt(f.grid, params, base, sup0 + eta_max, eta_max) for f in inits)
        dt = None if math.isinf(dt) else dt
    times = base.times()
    configs = [replace(c, dt=dt, record_times=tuple(times)) for c in configs]
    runs = _map_runs([(f, c, params) for f, c in zip(inits, configs)], jobs)

    gaps, sups = [], []
    worst = (-math.inf, 0.0, 0.0)
    for k, (a, b) in enumerate(zip(runs, runs[1:])):
        # lower rung first: b below a in the eps ladder, a below b in the radius ladder
        lo, hi = (a, b) if cauchy else (b, a)
        n = lo.grid.n_nodes
        vlo = lo.values()
        vhi = hi.values()[:, :n]
        diff = vlo - vhi
        i, j = np.unravel_index(np.argmax(diff), diff.shape)
        if diff[i, j] > worst[0]:
            worst = (float(diff[i, j]), float(times[i]), float(lo.grid.nodes[j]))
        l1 = np.abs(diff) @ lo.grid.volumes
        gaps.append(_time_integral(times, l1))
        sups.append(float(np.abs(diff).max()))
    if worst[0] > mono_tol:
        raise MonotonicityViolation(worst[1], worst[2], worst[0])
    return SweepResult(runs, gaps, sups, max(worst[0], 0.0) if runs[1:] else 0.0)


__all__ = [
    "SimConfig",
    "DiagnosticsSeries",
    "RunResult",
    "SweepResult",
    "SERIES_COLUMNS",
    "step",
    "run",
    "sweep_limit",
    "max_stable_dt",
    "cfl_coefficient",
    "initial_values",
]
