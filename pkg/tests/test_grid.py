import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quenchlab.grid import (
    Domain,
    Field,
    Grid,
    gradient_power_sup,
    laplacian,
    laplacian_of_power,
    norms,
    read_field_csv,
    solve_zeta,
    write_field_csv,
)
from quenchlab.params import ModelParams, stationary_constant


def test_laplacian_of_constant_is_zero(unit_interval):
    f = Field(unit_interval, np.full(unit_interval.n_nodes, 3.0))
    np.testing.assert_allclose(laplacian_of_power(f, 1.7).values, 0.0, atol=1e-9)


def test_laplacian_exact_on_quadratics(unit_interval):
    x = unit_interval.nodes
    lap = laplacian(unit_interval, x**2)
    np.testing.assert_allclose(lap[unit_interval.interior], 2.0, rtol=1e-10)
    assert np.all(lap[unit_interval.boundary] == 0.0)


@pytest.mark.parametrize("n_dim", [2, 3])
def test_radial_laplacian_of_r_squared(n_dim):
    g = Grid(Domain.ball(1.0, n_dim), 128)
    lap = laplacian(g, g.nodes**2)
    np.testing.assert_allclose(lap[g.interior], 2.0 * n_dim, rtol=1e-8)


def test_volumes_sum_to_measure():
    for dom in (Domain.interval(-1.0, 2.0), Domain.ball(1.5, 2), Domain.ball(0.7, 3)):
        g = Grid(dom, 50)
        assert g.volumes.sum() == pytest.approx(dom.measure, rel=1e-12)


def test_norms_of_one():
    g = Grid(Domain.interval(0.0, 1.0), 256)
    f = Field(g, np.ones(g.n_nodes))
    n = norms(f, solve_zeta(g))
    assert n.sup == 1.0
    assert n.l1 == pytest.approx(1.0)
    assert n.l1_zeta == pytest.approx(1.0 / 12.0, rel=1e-4)
    zero = norms(Field(g, np.zeros(g.n_nodes)), solve_zeta(g))
    assert zero.sup == zero.l1 == zero.lq == zero.l1_zeta == 0.0


def test_zeta_solves_poisson_and_is_comparable_to_distance():
    g = Grid(Domain.ball(1.0, 3), 128)
    w = solve_zeta(g)
    np.testing.assert_allclose(-laplacian(g, w.zeta_values)[g.interior], 1.0, rtol=1e-8)
    assert np.all(w.zeta_values[g.boundary] == 0.0)
    lo, hi = w.comparison_constants()
    assert 0 < lo <= hi < np.inf


def test_gradient_power_sup_examples(unit_interval):
    x = unit_interval.nodes
    assert gradient_power_sup(Field(unit_interval, np.full(x.size, 2.0)), 1.0) == 0.0
    assert gradient_power_sup(Field(unit_interval, x.copy()), 1.0) == pytest.approx(1.0, rel=1e-12)
    p = ModelParams(1.0, 1.0, 2)
    g = Grid(Domain.ball(1.0, 2), 256)
    k = stationary_constant(p)
    f = Field(g, k ** (1 / p.m) * g.nodes ** (2 / (p.m + p.beta)))
    assert gradient_power_sup(f, (p.m + p.beta) / 2) == pytest.approx(1.0, abs=1e-2)


def test_field_csv_round_trip(tmp_path, disc):
    f = Field(disc, np.cos(disc.nodes) ** 2, 0.3)
    write_field_csv(f, tmp_path / "u.csv")
    name, x, u = read_field_csv(tmp_path / "u.csv")
    assert name == "r"
    np.testing.assert_array_equal(x, disc.nodes)
    np.testing.assert_array_equal(u, f.values)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 5.0), min_size=17, max_size=17))
def test_laplacian_is_conservative(vals):
    # sum of volume-weighted interior Laplacian equals the boundary flux
    g = Grid(Domain.interval(0.0, 1.0), 16)
    v = np.array(vals)
    lap = laplacian(g, v)
    flux = (v[-1] - v[-2]) / g.h - (v[1] - v[0]) / g.h
    assert np.sum(lap[g.interior] * g.volumes[g.interior]) == pytest.approx(flux, abs=1e-9)
