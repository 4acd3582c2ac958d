import math

import numpy as np
import pytest

from quenchlab.barriers import (
    BarrierSpec,
    analytic_coefficient,
    normalizing_lambda,
    eval as barrier_eval,
    positivity_bound,
    quench_bounds,
    stationary_residual,
    subsolution_step_deficit,
    supersolution_step_excess,
)
from quenchlab.errors import InvalidParameters
from quenchlab.grid import Domain, Grid
from quenchlab.params import ModelParams, general_barrier_constant, stationary_constant
from quenchlab.solver import SimConfig, max_stable_dt

P = ModelParams(1.0, 0.5, 2)


def test_y_ode_values():
    spec = BarrierSpec.y_ode(0.0, 1.0, 1.0)
    assert barrier_eval(spec, 0.5, 0.0, P) == pytest.approx(0.5)
    assert barrier_eval(spec, 1.0, 0.0, P) == 0.0
    assert barrier_eval(spec, 3.0, 0.0, P) == 0.0


def test_profiles_at_reference_points():
    p = ModelParams(1.0, 1.0, 2)
    assert barrier_eval(BarrierSpec.u_stationary(1.0), 0.0, 1.0, p) == pytest.approx(1.0)
    spec = BarrierSpec.U_super(0.5, 0.1, 1.0, 1.0, t0=0.2, x0=0.3)
    assert barrier_eval(spec, 0.2, 0.3, p) == pytest.approx(1.0)


def test_barrier_before_t0_is_an_error():
    with pytest.raises(InvalidParameters):
        barrier_eval(BarrierSpec.z_ode(1.0, 1.0, t0=1.0), 0.5, 0.0, P)


def test_analytic_coefficient_signs():
    k = stationary_constant(P)
    assert analytic_coefficient(P, k) == pytest.approx(0.0, abs=1e-12)
    assert analytic_coefficient(P, k / 2) > 0
    assert analytic_coefficient(P, 2 * k) < 0


def test_residual_converges_with_fixed_collar():
    k = stationary_constant(P)
    res = [stationary_residual(BarrierSpec.u_stationary(k), Grid(Domain.ball(1.0, 2), n), P, 0.1)
           .discrete_sup_residual for n in (64, 128, 256)]
    assert res[0] / res[1] > 1.8 and res[1] / res[2] > 1.8


def test_residual_on_interval_needs_an_endpoint():
    g = Grid(Domain.interval(0.0, 1.0), 64)
    p = ModelParams(1.5, 0.5, 1)
    with pytest.raises(InvalidParameters):
        stationary_residual(BarrierSpec.u_stationary(1.0, 0.5), g, p)
    res = stationary_residual(BarrierSpec.u_stationary(stationary_constant(p), 0.0), g, p, 0.1)
    assert res.discrete_sup_residual < 1e-2


def test_quench_bounds_values():
    qb = quench_bounds(ModelParams(1.0, 0.5, 1), 1.0, 0.5)
    assert qb.lambda_used == pytest.approx(0.5)
    assert qb.tau_barrier == pytest.approx(4.0)
    assert quench_bounds(P, 0.0, 0.5, t0=0.7).tau_barrier == 0.7


def test_positivity_bound_values():
    assert positivity_bound(P, 0.0) == 0.0
    assert positivity_bound(ModelParams(1.0, 1.0, 2), 1.0) == pytest.approx(1.0)
    assert positivity_bound(P, 0.5) == pytest.approx(2 / 1.5 * 0.5**1.5)


def test_validate_for():
    k = general_barrier_constant(2, 0.5, 1.0)
    with pytest.raises(InvalidParameters):
        BarrierSpec.U_super(0.5, 2 * k, 1.0, 1.0).validate_for(P)
    with pytest.raises(InvalidParameters):
        BarrierSpec.W_sub(10.0, 1.0, lam=1.0).validate_for(P)
    kw = stationary_constant(P.with_lambda(0.5))
    with pytest.raises(InvalidParameters):
        BarrierSpec.W_sub(0.5 * kw, 1.0, lam=0.5).validate_for(P)
    BarrierSpec.W_sub(kw, 1.0, lam=0.5).validate_for(P)


@pytest.mark.parametrize("params", [ModelParams(1.0, 0.5, 1), ModelParams(1.5, 0.5, 2), ModelParams(1.0, 0.5, 3)])
def test_one_step_barrier_ordering(params):
    g = Grid(Domain.ball(1.0, params.n_dim) if params.n_dim > 1 else Domain.interval(-1.0, 1.0), 128)
    cfg = SimConfig(eps=1e-9, boundary_mode="zero")
    dt = 0.5 * max_stable_dt(g, params, cfg, 2.0)
    qb = quench_bounds(params, 1.0, 0.5)
    u = BarrierSpec.U_super(0.5, general_barrier_constant(params.n_dim, 0.5, qb.lambda_used), 1.0, qb.lambda_used)
    assert supersolution_step_excess(u, g, params, cfg, 0.0, dt) <= 1e-10
    lam_w = params.lam / 2
    w = BarrierSpec.W_sub(stationary_constant(params.with_lambda(lam_w)), 0.5, lam_w)
    assert subsolution_step_deficit(w, g, params, cfg, 0.0, dt) <= 1e-10


def test_normalizing_lambda_normalizes():
    for p in (ModelParams(1.0, 0.1, 4), ModelParams(1.5, 0.3, 2)):
        lam = normalizing_lambda(p, radius=2.0)
        k = stationary_constant(p.with_lambda(lam))
        assert k * 2.0 ** (2 * p.m / (p.m + p.beta)) == pytest.approx(1.0)


def test_sharpness_ratios_follow_the_power_law():
    from quenchlab.barriers import sharpness_ratios

    p = ModelParams(1.0, 0.1, 4)
    crit = (p.m + p.beta) / 2
    assert all(abs(r - 1.0) < 0.05 for r in sharpness_ratios(p, crit, [128, 256, 512]))
    # below the critical exponent u^alpha ~ r^(2 alpha/(m+beta)) has an unbounded gradient
    alpha = crit - 0.25
    expected = 2.0 ** (1.0 - 2.0 * alpha / (p.m + p.beta))
    for r in sharpness_ratios(p, alpha, [128, 256, 512]):
        assert r == pytest.approx(expected, rel=1e-6)
