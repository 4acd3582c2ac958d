"""Explicit profiles, sub- and supersolutions, and the bounds they imply."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameters
from .grid import Field, Grid, laplacian
from .params import ModelParams, general_barrier_constant, stationary_constant
from .solver import SimConfig, step_frozen_boundary

KINDS = ("v_profile", "u_stationary", "y_ode", "z_ode", "U_super", "W_sub")


@dataclass(frozen=True)
class BarrierSpec:
    """One explicit profile; unused parameters stay at their defaults.

    ``lam`` is the rate inside the ODE factor (``y`` or ``z``), not the
    absorption scale of the equation.
    """

    kind: str
    q: float = 0.0
    C: float = 1.0
    theta: float = 0.0
    lam: float = 1.0
    t0: float = 0.0
    x0: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameters(f"unknown barrier kind {self.kind!r}")
        if self.kind in ("v_profile", "y_ode", "U_super") and not self.q < 1.0:
            raise InvalidParameters(f"q must be < 1, got {self.q}")
        if not self.C > 0:
            raise InvalidParameters(f"C must be > 0, got {self.C}")
        if self.theta < 0 or self.t0 < 0:
            raise InvalidParameters("theta and t0 must be >= 0")
        if not self.lam > 0:
            raise InvalidParameters(f"lam must be > 0, got {self.lam}")

    @classmethod
    def v_profile(cls, q, C, x0=0.0):
        return cls("v_profile", q=q, C=C, x0=x0)

    @classmethod
    def u_stationary(cls, C, x0=0.0):
        return cls("u_stationary", C=C, x0=x0)

    @classmethod
    def y_ode(cls, q, theta, lam, t0=0.0):
        return cls("y_ode", q=q, theta=theta, lam=lam, t0=t0)

    @classmethod
    def z_ode(cls, theta, lam, t0=0.0):
        return cls("z_ode", theta=theta, lam=lam, t0=t0)

    @classmethod
    def U_super(cls, q, C, theta, lam, t0=0.0, x0=0.0):
        return cls("U_super", q=q, C=C, theta=theta, lam=lam, t0=t0, x0=x0)

    @classmethod
    def W_sub(cls, C, theta, lam=0.5, t0=0.0, x0=0.0):
        return cls("W_sub", C=C, theta=theta, lam=lam, t0=t0, x0=x0)

    def validate_for(self, params: ModelParams) -> None:
        """Checks that need the model: ``C <= K`` for U, ``lam = 1/2`` and ``C >= K`` for W."""
        if self.kind == "U_super":
            k = general_barrier_constant(params.n_dim, self.q, self.lam)
            if self.C > k * (1 + 1e-12):
                raise InvalidParameters(f"U_super needs C <= {k:.6g}, got {self.C}")
        elif self.kind == "W_sub":
            if not math.isclose(self.lam, 0.5 * params.lam):
                raise InvalidParameters(f"W_sub needs lam = {0.5 * params.lam}, got {self.lam}")
            k = stationary_constant(params.with_lambda(self.lam))
            if self.C < k * (1 - 1e-12):
                raise InvalidParameters(f"W_sub needs C >= {k:.6g}, got {self.C}")


def _ode(theta, a, rate, dt):
    """``[theta^a - rate a dt]_+^(1/a)``."""
    base = np.maximum(theta**a - rate * a * dt, 0.0)
    return base ** (1.0 / a)


def eval(spec: BarrierSpec, t, x, params: ModelParams):  # noqa: A001 - public name
    """Closed-form value at time ``t`` and coordinate ``x`` (scalar or array)."""
    m, beta = params.m, params.beta
    r = np.abs(np.asarray(x, dtype=float) - spec.x0)
    dt = float(t) - spec.t0
    if spec.kind in ("y_ode", "z_ode", "U_super", "W_sub") and dt < 0:
        raise InvalidParameters(f"t={t} precedes t0={spec.t0}")
    k = spec.kind
    if k == "v_profile":
        out = spec.C * r ** (2.0 / (1.0 - spec.q))
    elif k == "u_stationary":
        out = spec.C ** (1.0 / m) * r ** (2.0 / (m + beta))
    elif k == "y_ode":
        out = np.full_like(r, _ode(spec.theta, 1.0 - spec.q, spec.lam, dt))
    elif k == "z_ode":
        out = np.full_like(r, _ode(spec.theta, (m + beta) / m, spec.lam, dt))
    elif k == "U_super":
        y = _ode(spec.theta, 1.0 - spec.q, spec.lam, dt)
        out = (spec.C * r ** (2.0 / (1.0 - spec.q)) + y**m) ** (1.0 / m)
    else:
        z = _ode(spec.theta, (m + beta) / m, spec.lam, dt)
        out = (spec.C * r ** (2.0 * m / (m + beta)) + z**m) ** (1.0 / m)
    return float(out) if out.ndim == 0 else out


def barrier_field(spec: BarrierSpec, grid: Grid, params: ModelParams, t: float = 0.0) -> Field:
    return Field(grid, eval(spec, t, grid.nodes, params), t)


@dataclass(frozen=True)
class StationaryResidual:
    analytic_coeff: float
    discrete_sup_residual: float
    nodes: np.ndarray
    operator_values: np.ndarray  # -L_h(u^m) + lam u^-beta at every interior node but x0


def analytic_coefficient(params: ModelParams, C: float) -> float:
    """Bracket multiplying ``|x-x0|^(-2 beta/(m+beta))`` in ``-Lap u^m + lam u^-beta``."""
    m, beta, n, lam = params.m, params.beta, params.n_dim, params.lam
    return lam * C ** (-beta / m) - 2.0 * m * (n * (m + beta) - 2.0 * beta) * C / (m + beta) ** 2


def stationary_residual(
    spec: BarrierSpec, grid: Grid, params: ModelParams, collar_width: float | None = None
) -> StationaryResidual:
    """Apply the discrete operator to the stationary profile.

    Nodes closer than ``collar_width`` (default ``3h``) to ``x0`` are left out
    of the residual supremum.
    """
    if spec.kind != "u_stationary":
        raise InvalidParameters("stationary_residual needs a u_stationary spec")
    if grid.is_ball and spec.x0 != 0.0:
        raise InvalidParameters("on a ball x0 must be the centre")
    if not grid.is_ball and spec.x0 not in (grid.domain.a, grid.domain.b):
        raise InvalidParameters("on an interval x0 must be an endpoint")
    m, beta, lam = params.m, params.beta, params.lam
    collar = 3.0 * grid.h if collar_width is None else float(collar_width)
    r = np.abs(grid.nodes - spec.x0)
    u = eval(spec, 0.0, grid.nodes, params)
    lap = laplacian(grid, u**m)
    keep = grid.interior & (r > 0)
    op = -lap[keep] + lam * u[keep] ** (-beta)
    coeff = analytic_coefficient(params, spec.C)
    res = np.abs(op - coeff * r[keep] ** (-2.0 * beta / (m + beta)))
    far = r[keep] > collar * (1 - 1e-12)
    sup = float(res[far].max()) if np.any(far) else 0.0
    return StationaryResidual(coeff, sup, grid.nodes[keep].copy(), op)


@dataclass(frozen=True)
class QuenchBounds:
    tau_barrier: float
    lambda_used: float
    mu_used: float


def quench_bounds(params: ModelParams, sup_u0: float, q: float, t0: float = 0.0) -> QuenchBounds:
    """Upper bound on the complete quenching time from the ``U`` supersolution.

    On ``(0, M]`` the absorption ``lam u^-beta`` dominates ``mu u^q`` once
    ``mu <= lam M^-(q+beta)``; the barrier uses ``mu = 2 lambda``.
    """
    if not 0.0 < q < 1.0:
        raise InvalidParameters(f"q must lie in (0, 1), got {q}")
    if sup_u0 < 0:
        raise InvalidParameters("sup_u0 must be >= 0")
    if sup_u0 == 0.0:
        return QuenchBounds(t0, math.inf, math.inf)
    lam_used = params.lam * sup_u0 ** (-(q + params.beta)) / 2.0
    tau = t0 + sup_u0 ** (1.0 - q) / (lam_used * (1.0 - q))
    return QuenchBounds(tau, lam_used, 2.0 * lam_used)


def positivity_bound(params: ModelParams, theta: float) -> float:
    """Time before which the ``W`` barrier with this ``theta`` stays positive."""
    if theta < 0:
        raise InvalidParameters("theta must be >= 0")
    m, beta = params.m, params.beta
    return 2.0 * m * theta ** ((m + beta) / m) / (m + beta)


def _one_step(spec, grid, params, config, t, dt):
    u = np.asarray(eval(spec, t, grid.nodes, params), dtype=float).copy()
    nxt = np.asarray(eval(spec, t + dt, grid.nodes, params), dtype=float)
    u[grid.boundary] = nxt[grid.boundary]
    out = step_frozen_boundary(Field(grid, u, t), replace(config, eta=None), params, dt)
    return out.values, nxt


def supersolution_step_excess(
    spec: BarrierSpec, grid: Grid, params: ModelParams, config: SimConfig, t: float, dt: float
) -> float:
    """``max(u(t+dt) - U(t+dt))`` after one solver step started from ``u(t) = U(t)``."""
    if spec.kind != "U_super":
        raise InvalidParameters("needs a U_super spec")
    spec.validate_for(params)
    u, bar = _one_step(spec, grid, params, config, t, dt)
    return float(np.max((u - bar)[grid.interior]))


def subsolution_step_deficit(
    spec: BarrierSpec, grid: Grid, params: ModelParams, config: SimConfig, t: float, dt: float
) -> float:
    """``max(W(t+dt) - u(t+dt))`` after one solver step started from ``u(t) = W(t)``."""
    if spec.kind != "W_sub":
        raise InvalidParameters("needs a W_sub spec")
    spec.validate_for(params)
    u, bar = _one_step(spec, grid, params, config, t, dt)
    return float(np.max((bar - u)[grid.interior]))


def normalizing_lambda(params: ModelParams, radius: float = 1.0) -> float:
    """Absorption scale making ``K R^(2m/(m+beta)) = 1``, so ``u^m = 1`` on the sphere."""
    base = stationary_constant(params.with_lambda(1.0))
    # K scales as lam^(m/(m+beta))
    target = radius ** (-2.0 * params.m / (params.m + params.beta))
    return (target / base) ** ((params.m + params.beta) / params.m)


def sharpness_ratios(
    params: ModelParams, exponent: float, cells: list[int], radius: float = 1.0
) -> list[float]:
    """Ratios of ``gradient_power_sup`` of the stationary profile under refinement."""
    from .grid import Domain, gradient_power_sup

    lam = normalizing_lambda(params, radius)
    p = params.with_lambda(lam)
    spec = BarrierSpec.u_stationary(stationary_constant(p))
    vals = []
    for n in cells:
        g = Grid(Domain.ball(radius, params.n_dim), n)
        vals.append(gradient_power_sup(barrier_field(spec, g, p), exponent))
    return [b / a for a, b in zip(vals, vals[1:])]
