"""Extinction and free-boundary diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .barriers import BarrierSpec, eval as barrier_eval
from .errors import InvalidParameters, SeriesTooShort
from .grid import Field
from .params import ModelParams, general_barrier_constant
from .solver import RunResult

DEFAULT_SOBOLEV_L = 4.0


@dataclass(frozen=True)
class EnergyExponents:
    q_star: float
    interp_theta: float
    sigma: float
    sobolev_l: float


def energy_exponents(params: ModelParams, q: float, sobolev_l: float | None = None) -> EnergyExponents:
    """Exponents of the differential inequality ``y' + C y^sigma <= 0`` for ``y = ||u||_q^q``.

    The Sobolev exponent is ``2N/(N-2)`` for ``N >= 3``; in lower dimensions
    any finite ``l > 2`` may be supplied (default 4).
    """
    n, m, beta = params.n_dim, params.m, params.beta
    if q < beta + 2.0:
        raise InvalidParameters(f"q={q} must be >= beta + 2 = {beta + 2.0}")
    if n >= 3:
        ell = 2.0 * n / (n - 2.0)
    else:
        ell = DEFAULT_SOBOLEV_L if sobolev_l is None else float(sobolev_l)
        if not ell > 2.0:
            raise InvalidParameters(f"sobolev_l must be > 2, got {ell}")
    q_star = (m + q - 1.0) * ell / 2.0
    low = q - beta - 1.0
    theta = (1.0 / q - 1.0 / low) / (1.0 / q_star - 1.0 / low)
    if not 0.0 < theta < 1.0:
        raise InvalidParameters(f"interpolation exponent {theta} outside (0, 1)")
    sigma = 1.0 / (1.0 + q * theta * (ell - 2.0) / (2.0 * q_star))
    return EnergyExponents(q_star, theta, sigma, ell)


@dataclass(frozen=True)
class EnergyReport:
    q: float
    q_star: float
    interp_theta: float
    sigma: float
    fitted_C: float
    ode_violations: int
    extinction_bound: float
    sobolev_l: float
    records_used: int


def energy_check(
    result: RunResult,
    params: ModelParams,
    q: float,
    sobolev_l: float | None = None,
    ode_tol: float = 0.05,
) -> EnergyReport:
    ex = energy_exponents(params, q, sobolev_l)
    sigma = ex.sigma
    vol = result.grid.volumes
    t = result.series.t
    y = np.array([float(np.sum(s.values**q * vol)) for s in result.snapshots])
    if len(y) < 3:
        raise SeriesTooShort("need at least three records")
    if y[0] <= 0.0:
        return EnergyReport(q, ex.q_star, ex.interp_theta, sigma, math.nan, 0, 0.0, ex.sobolev_l, 0)
    qt = result.quench_time if result.quench_time is not None else math.inf
    idx = [i for i in range(1, len(y) - 1) if y[i] > 0.0 and t[i] < qt]
    if len(idx) < 2:
        raise SeriesTooShort("fewer than two usable records before quenching")
    idx = np.array(idx)
    dy = (y[idx + 1] - y[idx - 1]) / (t[idx + 1] - t[idx - 1])
    ratio = -dy / y[idx] ** sigma
    fitted = max(float(ratio.min()), 0.0)
    viol = int(np.sum(-dy < fitted * y[idx] ** sigma * (1.0 - ode_tol)))
    bound = math.inf if fitted == 0.0 else y[0] ** (1.0 - sigma) / (fitted * (1.0 - sigma))
    return EnergyReport(q, ex.q_star, ex.interp_theta, sigma, fitted, viol, bound, ex.sobolev_l, len(idx))


@dataclass(frozen=True)
class SupportInfo:
    support_measure: float
    free_boundary_positions: list[float]


def support_tracker(fld: Field, tol: float = 1e-10) -> SupportInfo:
    """Measure of ``{u > tol}`` and the interpolated crossings of ``u = tol``."""
    if not tol > 0:
        raise InvalidParameters("tol must be > 0")
    u, x = fld.values, fld.grid.nodes
    measure = float(np.sum(fld.grid.volumes[u > tol]))
    d = u - tol
    pos = []
    for i in np.flatnonzero((d[:-1] > 0) != (d[1:] > 0)):
        a, b = d[i], d[i + 1]
        s = a / (a - b) if a != b else 0.5
        pos.append(float(x[i] + s * (x[i + 1] - x[i])))
    return SupportInfo(measure, pos)


def _node_index(grid, x0: float) -> int:
    i = int(np.argmin(np.abs(grid.nodes - x0)))
    if abs(grid.nodes[i] - x0) > 1e-9 * max(1.0, abs(x0)) + 1e-12:
        raise InvalidParameters(f"x0={x0} is not a grid node")
    return i


def dead_core_check(result: RunResult, x0: float, tol: float = 1e-10) -> bool:
    """True when ``u(t, x0) <= tol`` at every record after the first."""
    i = _node_index(result.grid, x0)
    return all(s.values[i] <= tol for s in result.snapshots[1:])


@dataclass(frozen=True)
class DeadCoreRadius:
    radius_ii: float
    radius_iii: float
    used: float
    constant: float


def dead_core_radius(params: ModelParams) -> DeadCoreRadius:
    """Minimal boundary distance for the local barrier around ``x0``.

    The two available statements give ``K^(-2/(1-q))`` and
    ``K^(-(m+beta)/(2m))`` (``q = -beta/m``); the larger one is used.
    """
    q = -params.beta / params.m
    k = general_barrier_constant(params.n_dim, q, params.lam)
    r2 = k ** (-2.0 / (1.0 - q))
    r3 = k ** (-(params.m + params.beta) / (2.0 * params.m))
    return DeadCoreRadius(r2, r3, max(r2, r3), k)


def max_excess_over(result: RunResult, spec: BarrierSpec, params: ModelParams,
                    radius: float | None = None) -> float:
    """``max (u - barrier)`` over records and nodes within ``radius`` of ``x0``."""
    x = result.grid.nodes
    near = np.ones(x.size, dtype=bool) if radius is None else np.abs(x - spec.x0) <= radius
    worst = -math.inf
    for s in result.snapshots:
        bar = barrier_eval(spec, max(s.time, spec.t0), x, params)
        worst = max(worst, float(np.max((s.values - bar)[near])))
    return worst


def write_free_boundary_csv(result: RunResult, path, tol: float = 1e-10) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    radial = result.grid.is_ball
    with open(path, "w", newline="") as fh:
        fh.write("t,radius\n" if radial else "t,left_boundary,right_boundary\n")
        for s in result.snapshots:
            pos = support_tracker(s, tol).free_boundary_positions
            if radial:
                r = max(pos) if pos else math.nan
                fh.write(f"{s.time:.17g},{r:.17g}\n")
            else:
                lo = min(pos) if pos else math.nan
                hi = max(pos) if pos else math.nan
                fh.write(f"{s.time:.17g},{lo:.17g},{hi:.17g}\n")
