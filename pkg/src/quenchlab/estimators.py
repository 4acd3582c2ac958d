"""Numerical checks of the gradient, Hölder and smoothing estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, InsufficientSeries, InvalidParameters, NotApplicable
from .params import (
    ModelParams,
    classify,
    omega_candidates,
    smoothing_exponents,
    universal_gradient_constant,
)
from .solver import RunResult

OMEGA_CHOICES = ("m_ge_1", "m_gt_1", "alt", "fitted")


def _loglog_slope(t: np.ndarray, y: np.ndarray) -> float:
    ok = (t > 0) & (y > 0) & np.isfinite(y)
    if ok.sum() < 2:
        raise InsufficientSeries("need at least two positive samples to fit a slope")
    slope, _ = np.polyfit(np.log(t[ok]), np.log(y[ok]), 1)
    return float(slope)


@dataclass(frozen=True)
class GradientBoundReport:
    omega_choice: str
    fitted_omega: float
    candidates: dict[str, float]
    violations: list[tuple[float, float, float]] = field(default_factory=list)
    universal_bound: float | None = None
    universal_ok: bool | None = None
    max_ratio: float | None = None


def check_gradient_bounds(
    result: RunResult,
    params: ModelParams,
    u0_grad_pow_sup: float,
    omega_choice: str = "fitted",
    window: tuple[float, float] | None = None,
    bound_tol: float = 0.05,
) -> GradientBoundReport:
    """Fit the small-time exponent of ``||grad u^(1/gamma)||_inf`` and, where
    the time-uniform bound applies, check every record against it."""
    if omega_choice not in OMEGA_CHOICES:
        raise InvalidParameters(f"omega_choice must be one of {OMEGA_CHOICES}")
    s = result.series
    if len(s) < 10:
        raise InsufficientSeries(f"need >= 10 records, got {len(s)}")
    t, g = s.t, s.grad_gamma_sup
    lo, hi = window if window is not None else (t[t > 0].min() if np.any(t > 0) else 0.0, t.max())
    sel = (t >= lo) & (t <= hi)
    try:
        fitted = -_loglog_slope(t[sel], g[sel])
    except InsufficientSeries:
        fitted = math.nan
    cands = omega_candidates(params)

    bound = ok = worst = None
    violations: list[tuple[float, float, float]] = []
    try:
        applicable = classify(params).universal_bound_applicable
    except Exception:
        applicable = False
    if applicable:
        const = universal_gradient_constant(params)
        if u0_grad_pow_sup <= const:
            bound = max(u0_grad_pow_sup, const)
            rhs = bound * (1.0 + bound_tol)
            violations = [(float(a), float(b), rhs) for a, b in zip(t, g) if b > rhs]
            ok = not violations
            worst = float(np.max(g) / bound)
    return GradientBoundReport(omega_choice, fitted, cands, violations, bound, ok, worst)


# --- Bernstein-type pointwise inequality -------------------------------------------


@dataclass(frozen=True)
class BernsteinResult:
    min_slack: float
    worst_case: dict


def bernstein_terms(g, dg, grad: np.ndarray, hess: np.ndarray) -> tuple[float, float, float]:
    """Return ``(S, slack, scale)`` at one point.

    ``S = g |D2u|^2 + g'(grad u . D2u grad u - |grad u|^2 Lap u)`` (the first
    bracket is ``1/2 grad u . grad |grad u|^2``); ``slack`` adds the lower bound
    back in, ``scale`` is the sum of absolute term sizes.
    """
    n = grad.size
    w = float(grad @ grad)
    t1 = g * float(np.sum(hess * hess))
    t2 = float(grad @ hess @ grad)
    t3 = w * float(np.trace(hess))
    corr = (n - 1) * dg * dg * w * w / (4.0 * g)
    s = t1 + dg * (t2 - t3)
    scale = abs(t1) + abs(dg) * (abs(t2) + abs(t3)) + corr
    return s, s + corr, scale


def _random_cubic(rng, n):
    b = rng.normal(size=n)
    a = rng.normal(size=(n, n))
    a = 0.5 * (a + a.T)
    t = rng.normal(size=(n, n, n))
    # symmetrize the cubic coefficient tensor
    t = sum(np.transpose(t, p) for p in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))) / 6.0
    return b, a, t


def bernstein_sample(n_dim: int, trials: int, seed: int) -> BernsteinResult:
    """Random-polynomial check of the Bernstein inequality with exact derivatives.

    ``u(x) = c0 + b.x + x.A.x/2 + T(x,x,x)/6`` and ``g(s) = (s + c)^a``.
    """
    if trials < 1:
        raise InvalidParameters("trials must be >= 1")
    if n_dim < 1:
        raise InvalidParameters("n_dim must be >= 1")
    rng = np.random.default_rng(seed)
    min_rel = math.inf
    worst: dict = {}
    for k in range(trials):
        b, a_mat, t = _random_cubic(rng, n_dim)
        x = rng.uniform(-1.0, 1.0, size=n_dim)
        u_val = rng.uniform(0.0, 2.0)  # c0 is fixed implicitly by this value at x
        grad = b + a_mat @ x + 0.5 * np.einsum("ijk,j,k->i", t, x, x)
        hess = a_mat + np.einsum("ijk,k->ij", t, x)
        a = rng.uniform(0.2, 3.0)
        c = rng.uniform(0.05, 2.0)
        g = (u_val + c) ** a
        dg = a * (u_val + c) ** (a - 1.0)
        s, slack, scale = bernstein_terms(g, dg, grad, hess)
        rel = slack / scale if scale > 0 else 0.0
        if rel < min_rel:
            min_rel = rel
            worst = {"trial": k, "n_dim": n_dim, "a": a, "c": c, "u": u_val, "S": s,
                     "slack": slack, "scale": scale}
    return BernsteinResult(float(min_rel), worst)


# --- smoothing ---------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothingFit:
    fitted_decay: float
    expected: float
    branch: str


def smoothing_fit(
    result: RunResult, params: ModelParams, window: tuple[float, float], branch: str = "universal"
) -> SmoothingFit:
    """Log-log slope of ``sup u`` over ``window``.

    ``universal`` expects ``-1/(m-1)``; ``weighted`` expects ``-alpha``.
    """
    if branch == "universal":
        if params.m <= 1.0:
            raise NotApplicable("the universal decay needs m > 1")
        expected = -1.0 / (params.m - 1.0)
    elif branch == "weighted":
        expected = -smoothing_exponents(params)[0]
    else:
        raise InvalidParameters(f"unknown branch {branch!r}")
    t = result.series.t
    sel = (t >= window[0]) & (t <= window[1])
    if sel.sum() < 3:
        raise InsufficientSeries("fewer than three records inside the window")
    return SmoothingFit(_loglog_slope(t[sel], result.series.sup_u[sel]), expected, branch)


# --- gradient Cauchy metric ----------------------------------------------------------


def _grad_sq_integral(grid, d: np.ndarray) -> float:
    slopes = np.diff(d) / grid.h
    return float(np.sum(slopes**2 * grid.cell_volumes()))


def grad_cauchy_metric(run_a: RunResult, run_b: RunResult, window: tuple[float, float]) -> float:
    """``int_tau^T int |grad(u_a - u_b)|^2`` (trapezoid in time, cellwise in space)."""
    if not run_a.grid.same_as(run_b.grid):
        raise GridMismatch("runs live on different grids")
    ta, tb = run_a.series.t, run_b.series.t
    if ta.shape != tb.shape or not np.allclose(ta, tb, rtol=0, atol=1e-12):
        raise GridMismatch("runs were recorded at different times")
    tau, t_end = window
    sel = np.flatnonzero((ta >= tau - 1e-12) & (ta <= t_end + 1e-12))
    if sel.size == 0:
        raise InsufficientSeries("no records inside the window")
    vals = [
        _grad_sq_integral(run_a.grid, run_a.snapshots[i].values - run_b.snapshots[i].values)
        for i in sel
    ]
    if sel.size == 1:
        return vals[0]
    return float(np.trapezoid(vals, ta[sel]))


# --- Hölder modulus ----------------------------------------------------------------


@dataclass(frozen=True)
class HolderReport:
    empirical_sup_ratio: float
    bound_constants: tuple[float, float]
    pairs_used: int


def holder_modulus(
    result: RunResult, params: ModelParams, pairs: int, seed: int, tau: float | None = None
) -> HolderReport:
    """Largest sampled ratio of ``|w(t,x) - w(s,y)|`` to the modulus, ``w = u^((m+1)/2)``."""
    if params.beta > 1.0:
        raise NotApplicable("this modulus is stated for beta <= 1")
    t = result.series.t
    tau = float(t[t > 0].min()) if tau is None and np.any(t > 0) else (tau or 0.0)
    idx = np.flatnonzero(t >= tau)
    if idx.size < 3:
        raise InsufficientSeries("need snapshots at >= 3 times after tau")
    grid = result.grid
    sup0 = float(result.snapshots[0].values.max())
    n, m, beta = params.n_dim, params.m, params.beta
    c2 = sup0 ** ((1.0 - beta) / 2.0)
    c3 = math.sqrt(grid.domain.measure) * sup0 ** ((m - beta) / 2.0)
    w = result.values()[idx] ** ((m + 1.0) / 2.0)
    times = t[idx]
    rng = np.random.default_rng(seed)
    i1 = rng.integers(0, idx.size, pairs)
    i2 = rng.integers(0, idx.size, pairs)
    j1 = rng.integers(0, grid.n_nodes, pairs)
    j2 = rng.integers(0, grid.n_nodes, pairs)
    num = np.abs(w[i1, j1] - w[i2, j2])
    dt = np.abs(times[i1] - times[i2])
    dx = np.abs(grid.nodes[j1] - grid.nodes[j2])
    den = c2 * (dx + dt ** (1.0 / (3.0 * n))) + c3 * dt ** (1.0 / 3.0)
    ok = den > 0
    ratio = float(np.max(num[ok] / den[ok])) if np.any(ok) else 0.0
    return HolderReport(ratio, (c2, c3), int(ok.sum()))


def diffusion_dominated_constant(result: RunResult, params: ModelParams) -> float:
    """``max_t t sup_x |(u^(m-1))_x|^2 / ||u0||_inf^(m-1)`` for 1D runs with ``m >= beta + 2``."""
    if params.n_dim != 1 or params.m < params.beta + 2.0:
        raise NotApplicable("needs N = 1 and m >= beta + 2")
    sup0 = float(result.snapshots[0].values.max())
    if sup0 == 0.0:
        return 0.0
    h = result.grid.h
    best = 0.0
    for snap in result.snapshots:
        if snap.time <= 0:
            continue
        d = np.diff(snap.values ** (params.m - 1.0)) / h
        best = max(best, snap.time * float(np.max(d * d)))
    return best / sup0 ** (params.m - 1.0)
