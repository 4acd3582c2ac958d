import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quenchlab._kernels import absorb_exact
from quenchlab.errors import CflViolation, InvalidParameters
from quenchlab.grid import Domain, Field, Grid
from quenchlab.initial import bump
from quenchlab.params import ModelParams
from quenchlab.solver import (
    DiagnosticsSeries,
    SimConfig,
    max_stable_dt,
    run,
    step,
    step_frozen_boundary,
    sweep_limit,
)

P = ModelParams(1.0, 0.5, 1)


def _grid(n=64):
    return Grid(Domain.interval(0.0, 1.0), n)


@given(st.floats(0.05, 3.0), st.floats(1e-6, 0.05), st.floats(0.1, 1.5))
def test_absorb_exact_matches_closed_form_above_cutoff(u, dt, beta):
    eps = 1e-3
    exact_a = u ** (1 + beta) - (1 + beta) * dt
    new, ok = absorb_exact(u, dt, beta, 1.0, eps)
    assert ok
    if exact_a >= (2 * eps) ** (1 + beta):
        assert new == pytest.approx(exact_a ** (1 / (1 + beta)), rel=1e-12)
    else:
        assert eps <= new <= 2 * eps


@given(st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(1e-5, 0.5))
def test_absorb_exact_is_order_preserving(a, b, dt):
    lo, hi = sorted((a, b))
    wl, _ = absorb_exact(lo, dt, 0.5, 1.0, 1e-3)
    wh, _ = absorb_exact(hi, dt, 0.5, 1.0, 1e-3)
    assert 0.0 <= wl <= wh + 1e-15
    assert wh <= hi


def test_pure_absorption_closed_form_and_extinction():
    g = _grid(8)
    dt = 1e-5
    times = tuple(np.round(np.linspace(0.0, 0.8, 17), 12))
    r = run(Field(g, np.ones(g.n_nodes)),
            SimConfig(eps=1e-12, boundary_mode="zero", diffusion=False, dt=dt, t_end=0.8,
                      record_times=times), P)
    exact = np.maximum(1.0 - 1.5 * r.times, 0.0) ** (2.0 / 3.0)
    np.testing.assert_allclose(r.values()[:, g.interior], exact[:, None].repeat(7, 1), atol=1e-6)
    assert abs(r.quench_time - 2.0 / 3.0) <= dt


def test_zero_data_stays_zero():
    g = _grid()
    r = run(Field(g, np.zeros(g.n_nodes)), SimConfig(boundary_mode="zero", t_end=0.05, n_records=5), P)
    assert np.all(r.values() == 0.0)
    assert r.quench_time == 0.0


def test_heat_equation_decay():
    g = _grid(256)
    x = g.nodes
    r = run(Field(g, np.sin(np.pi * x)),
            SimConfig(boundary_mode="zero", absorption=False, t_end=0.1, n_records=4), P)
    exact = np.exp(-np.pi**2 * 0.1) * np.sin(np.pi * x)
    assert np.abs(r.snapshots[-1].values - exact).max() < 2e-4


def test_bump_quenches_in_finite_time():
    # eps below quench_tol: the absorption is switched off under eps
    g = _grid(128)
    r = run(bump(g, 0.5, 0.5, 0.5), SimConfig(eps=1e-12, boundary_mode="zero", t_end=0.3, n_records=30),
            ModelParams(1.2, 0.5, 1))
    assert r.quench_time is not None and 0 < r.quench_time < 0.3
    assert r.snapshots[-1].values.max() <= 1e-10


def test_fixed_dt_above_stability_limit_is_rejected():
    g = _grid(128)
    cfg = SimConfig(boundary_mode="zero", t_end=0.01)
    dt_max = max_stable_dt(g, P, cfg, 1.0)
    with pytest.raises(CflViolation):
        run(bump(g), SimConfig(boundary_mode="zero", t_end=0.01, dt=10 * dt_max, cfl_safety=1.0), P)


def test_lifted_boundary_and_step_modes():
    g = _grid()
    u0 = bump(g, 0.5, 0.5, 0.5)
    cfg = SimConfig(eps=0.05)
    out = step(u0, cfg, P, 1e-5)
    assert out.values[0] == out.values[-1] == pytest.approx(0.05)
    frozen = step_frozen_boundary(u0, cfg, P, 1e-5)
    assert frozen.values[0] == u0.values[0]
    with pytest.raises(InvalidParameters):
        step(u0, cfg, P, 0.0)


def test_runs_are_deterministic():
    g = _grid()
    cfg = SimConfig(eps=0.01, t_end=0.05, n_records=5)
    a = run(bump(g), cfg, P).values()
    b = run(bump(g), cfg, P).values()
    assert np.array_equal(a, b)


def test_single_rung_sweep_equals_run():
    g = _grid()
    u0 = bump(g, 0.5, 0.5, 0.5)
    base = SimConfig(t_end=0.05, n_records=5)
    sw = sweep_limit(u0, base, P, [(0.1, 0.1)])
    assert sw.l1_gaps == []
    direct = run(u0, sw.runs[0].config, P)
    assert np.array_equal(direct.values(), sw.runs[0].values())


def test_eps_ladder_is_ordered():
    g = _grid()
    sw = sweep_limit(bump(g, 0.5, 0.5, 0.5), SimConfig(t_end=0.1, n_records=10), P,
                     [(0.2, 0.2), (0.1, 0.1), (0.05, 0.05)])
    assert sw.worst_violation <= 1e-8
    assert sw.l1_gaps[1] <= sw.l1_gaps[0]


def test_radius_ladder_orders_small_ball_below():
    p = ModelParams(1.0, 0.5, 2)
    g = Grid(Domain.ball(2.0, 2), 64)
    u0 = Field(g, 0.3 * np.exp(-g.nodes**2))
    sw = sweep_limit(u0, SimConfig(boundary_mode="cauchy", eps=0.02, t_end=0.05, n_records=5,
                                   r_ladder=(1.0, 1.5, 2.0)), p)
    assert len(sw.runs) == 3
    assert sw.worst_violation <= 1e-8


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(0.0, 0.5))
def test_comparison_in_initial_data(height, extra):
    g = _grid(32)
    cfg = SimConfig(eps=0.01, t_end=0.02, n_records=2)
    lo = run(bump(g, 0.5, 0.6, height), cfg, P).values()
    hi = run(bump(g, 0.5, 0.6, height + extra), cfg, P).values()
    assert np.all(lo <= hi + 1e-12)


def test_series_csv_round_trip(tmp_path):
    g = _grid()
    r = run(bump(g), SimConfig(eps=0.05, t_end=0.02, n_records=4), P)
    r.series.to_csv(tmp_path / "s.csv")
    back = DiagnosticsSeries.from_csv(tmp_path / "s.csv")
    for name in ("t", "sup_u", "l1_zeta", "absorbed_mass_cum"):
        np.testing.assert_array_equal(back.column(name), r.series.column(name))


def test_config_validation():
    with pytest.raises(InvalidParameters):
        SimConfig(eps=0.01, eta=0.1)
    with pytest.raises(InvalidParameters):
        SimConfig(cfl_safety=1.5)
    with pytest.raises(InvalidParameters):
        SimConfig(t_end=1.0, record_times=(2.0,))
    assert SimConfig(eps=0.05).resolved_eta(0.02) == 0.02
    assert math.isclose(SimConfig(eps=0.05).resolved_eta(1.0), 0.05)
