import numpy as np
import pytest

from quenchlab.errors import GridMismatch, NotApplicable
from quenchlab.estimators import (
    bernstein_sample,
    bernstein_terms,
    check_gradient_bounds,
    grad_cauchy_metric,
    holder_modulus,
    smoothing_fit,
)
from quenchlab.grid import Domain, Field, Grid
from quenchlab.initial import bump
from quenchlab.params import ModelParams
from quenchlab.solver import SimConfig, run


def test_bernstein_linear_and_constant_cases():
    grad = np.array([1.0, -2.0, 0.5])
    s, slack, _ = bernstein_terms(2.0, 0.7, grad, np.zeros((3, 3)))
    w = grad @ grad
    assert s == 0.0
    assert slack == pytest.approx(2 * 0.49 * w * w / 8.0)
    hess = np.array([[1.0, 2.0, 0.0], [2.0, -1.0, 0.3], [0.0, 0.3, 4.0]])
    s, slack, _ = bernstein_terms(1.5, 0.0, grad, hess)
    assert slack == pytest.approx(1.5 * np.sum(hess * hess))


def test_bernstein_sample_is_nonnegative_and_reproducible():
    a = bernstein_sample(3, 10_000, 42)
    assert a.min_slack >= -1e-9
    assert bernstein_sample(3, 10_000, 42).min_slack == a.min_slack
    assert bernstein_sample(2, 2_000, 7).min_slack >= -1e-9


def _pme_run(m, amp, cells):
    g = Grid(Domain.interval(0.0, 1.0), cells)
    return run(Field(g, amp * np.sin(np.pi * g.nodes)),
               SimConfig(boundary_mode="zero", absorption=False, t_end=0.1,
                         record_times=tuple(np.geomspace(0.01, 0.1, 12)), cfl_safety=0.9),
               ModelParams(m, 0.5, 1))


def test_smoothing_decay_m3():
    fit = smoothing_fit(_pme_run(3.0, 300.0, 256), ModelParams(3.0, 0.5, 1), (0.01, 0.1))
    assert fit.expected == pytest.approx(-0.5)
    assert abs(fit.fitted_decay + 0.5) <= 0.075


def test_smoothing_not_applicable_for_heat():
    r = _pme_run(2.0, 1.0, 32)
    with pytest.raises(NotApplicable):
        smoothing_fit(r, ModelParams(1.0, 0.5, 1), (0.01, 0.1))


def test_grad_cauchy_metric_self_and_mismatch():
    g = Grid(Domain.interval(0.0, 1.0), 64)
    p = ModelParams(1.0, 0.5, 1)
    cfg = SimConfig(eps=0.05, t_end=0.05, n_records=5)
    a = run(bump(g, 0.5, 0.5, 0.5), cfg, p)
    assert grad_cauchy_metric(a, a, (0.0, 0.05)) == 0.0
    b = run(bump(Grid(Domain.interval(0.0, 1.0), 32), 0.5, 0.5, 0.5), cfg, p)
    with pytest.raises(GridMismatch):
        grad_cauchy_metric(a, b, (0.0, 0.05))


def test_zero_data_gradient_records():
    p = ModelParams(1.0, 0.5, 2)
    g = Grid(Domain.ball(1.0, 2), 32)
    r = run(Field(g, np.zeros(g.n_nodes)), SimConfig(boundary_mode="zero", t_end=0.01, n_records=12), p)
    rep = check_gradient_bounds(r, p, 0.0)
    assert np.all(r.series.grad_gamma_sup == 0.0)
    assert rep.universal_ok and not rep.violations


def test_holder_modulus_on_a_stationary_run_is_zero():
    p = ModelParams(1.0, 0.5, 1)
    g = Grid(Domain.interval(0.0, 1.0), 32)
    r = run(Field(g, np.zeros(g.n_nodes)), SimConfig(boundary_mode="zero", t_end=0.01, n_records=5), p)
    rep = holder_modulus(r, p, 500, 1)
    assert rep.empirical_sup_ratio == 0.0
    r = run(bump(g, 0.5, 0.5, 0.5), SimConfig(eps=0.05, t_end=0.05, n_records=5), p)
    assert np.isfinite(holder_modulus(r, p, 500, 1).empirical_sup_ratio)
