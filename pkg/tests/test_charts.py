import math

import numpy as np
import pytest

import hrl_py
from hrl_py.algorithms.chart_bounds import uniform_in_domain
from hrl_py.problems.gallery import gallery_domain
from hrl_py.utils.math import sphere_uniform

description = "testing boundary charts and the inequalities built on them"


def test_isometry():
    rng = np.random.default_rng(0)
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        iso = hrl_py.Isometry.random(n, rng)
        assert iso.orthogonality_error() <= 1e-12
        x, y = rng.standard_normal((2, 50, n))
        assert np.allclose(
            np.linalg.norm(iso.apply(x) - iso.apply(y), axis=1), np.linalg.norm(x - y, axis=1), atol=1e-12
        )
        assert np.allclose(iso.inverse().apply(iso.apply(x)), x)
        assert np.allclose(iso.compose(iso.inverse()).rotation, np.eye(n))
    with pytest.raises(ValueError):
        hrl_py.Isometry([[1.0, 1.0], [0.0, 1.0]], [0.0, 0.0])


def test_normalize_at():
    q = np.array([0.3, -0.2, 1.1])
    normal = np.array([1.0, 2.0, 2.0])
    iso = hrl_py.normalize_at(q, normal)
    assert np.allclose(iso.apply(q), 0.0, atol=1e-12)
    assert np.allclose(iso.rotation @ (normal / 3.0), [0.0, 0.0, 1.0], atol=1e-10)
    # a vertical normal gives the identity rotation
    assert np.array_equal(hrl_py.normalize_at(q, [0.0, 0.0, 2.0]).rotation, np.eye(3))
    with pytest.raises(hrl_py.DomainError):
        hrl_py.normalize_at(q, [0.0, 0.0, 0.0])


def test_sphere_chart():
    q = np.array([0.0, 0.6, 0.8])
    chart = hrl_py.FunctionChart.sphere(q, q, 0.3)
    value, grad, ok = chart.verify_normalization()
    assert ok and abs(value) <= 1e-10 and grad <= 1e-10
    rng = np.random.default_rng(1)
    # sphere points near q lie on the graph
    near = q + 0.1 * rng.standard_normal((20, 3))
    near /= np.linalg.norm(near, axis=1)[:, None]
    near = near[np.linalg.norm(chart.to_local(near)[:, :-1], axis=1) < 0.3]
    assert np.max(chart.graph_residual(near)) <= 1e-12
    lifted = chart.from_local(np.array([[0.1, -0.2], [0.0, 0.25]]))
    assert np.allclose(np.linalg.norm(lifted, axis=1), 1.0, atol=1e-12)
    assert abs(chart.c2 - 1.0 / 0.91**1.5) <= 1e-12
    assert hrl_py.estimate_c2(chart) <= chart.c2 * (1.0 + 1e-9)
    with pytest.raises(ValueError):
        hrl_py.FunctionChart.sphere(q, q, 1.0)


def test_quadric_chart():
    domain = gallery_domain(2, "zcz-0.3")
    theta = np.linspace(0.0, 2.0 * np.pi, 7)[:-1]
    boundary = np.column_stack([1.3 * np.cos(theta), 0.7 * np.sin(theta)])
    assert np.all(domain.covers(boundary))
    assert not np.any(domain.covers(0.9 * boundary))
    for q in boundary:
        chart = domain.chart_at(q)
        assert isinstance(chart, hrl_py.QuadricChart)
        assert chart.verify_normalization()[2]
        assert chart.c2 is not None and chart.c2 > 0
        # the closed-form root agrees with Newton's method on the level set
        generic = hrl_py.SurfaceChart(domain.surface, q, chart.iso, chart.alpha, chart.c2, chart.radius)
        zeta = np.linspace(-0.3, 0.3, 9)[:, None]
        assert np.allclose(chart.phi(zeta), generic.phi(zeta), atol=1e-12)
        assert np.allclose(chart.grad_phi(zeta), generic.grad_phi(zeta), atol=1e-6)


def test_chart_product_bound():
    q = np.array([0.0, 0.0, 1.0])
    charts = [
        hrl_py.FunctionChart.sphere(q, q, 0.3),
        hrl_py.FunctionChart.paraboloid(q, q, 0.3, a=-0.5),
    ]
    domain = gallery_domain(2, "zcz-0.3")
    charts.append(domain.chart_at([1.3, 0.0]))
    charts.append(domain.chart_at([0.0, 0.7]))
    for chart in charts:
        check = hrl_py.spot_check_chart(chart, pairs=10000, seed=3)
        assert check.normalization_ok
        assert check.product_violations == 0
        assert check.pair_count == 10000
    lhs, rhs = hrl_py.chart_product_bound(charts[0], [0.1, 0.0], [0.0, 0.2])
    assert isinstance(lhs, float) and lhs <= rhs
    with pytest.raises(hrl_py.DomainError):
        hrl_py.chart_product_bound(charts[0], [0.5, 0.0], [0.0, 0.0])
    bare = hrl_py.FunctionChart.paraboloid(q, q, 0.3, alpha=0.5)
    with pytest.raises(hrl_py.ConfigurationError):
        hrl_py.chart_product_bound(bare, [0.1, 0.0], [0.0, 0.0])


def test_paraboloid_c2():
    q = np.array([0.0, 1.0])
    chart = hrl_py.FunctionChart.paraboloid(q, q, 0.5, a=1.0)
    assert chart.c2 == 2.0
    check = hrl_py.spot_check_chart(chart, seed=4)
    assert abs(check.c2_estimate - 2.0) <= 1e-9
    # a declared constant below the estimate is flagged
    assert hrl_py.spot_check_chart(chart, c2=1.0, seed=4).exceeds


def test_atlas_lookup():
    q1 = np.array([0.0, 1.0])
    q2 = np.array([1.0, 0.0])
    domain = hrl_py.DomainSpec(
        2,
        charts=[hrl_py.FunctionChart.sphere(q1, q1, 0.5), hrl_py.FunctionChart.sphere(q2, q2, 0.5)],
        lipschitz_G=1.0,
    )
    assert domain.chart_at(q1) is domain.charts[0]
    p = np.array([math.sin(0.2), math.cos(0.2)])
    moved = domain.chart_at(p)
    assert np.allclose(moved.anchor, p)
    assert abs(moved.phi(np.zeros((1, 1)))[0]) <= 1e-10
    assert np.all(domain.covers(np.array([q1, q2, p])))
    with pytest.raises(hrl_py.ChartMismatchError):
        domain.chart_at(-q1)
    with pytest.raises(ValueError):
        hrl_py.DomainSpec(2)


def test_uniform_in_domain():
    chart = hrl_py.FunctionChart.sphere(np.array([0.0, 0.0, 1.0]), [0.0, 0.0, 1.0], 0.3)
    pts = uniform_in_domain(chart, 500, np.random.default_rng(0))
    assert pts.shape == (500, 2)
    assert np.all(chart.in_domain(pts))


def test_normal_component_bound():
    ball_map, domain = hrl_py.make_problem("identity", 3)
    trace = ball_map.trace()
    for eta in sphere_uniform(np.random.default_rng(2), 3, 3):
        chart = domain.chart_at(eta)
        bound = hrl_py.normal_component_bound(chart, trace, eta, 0.49, 1.0, delta=domain.delta)
        assert bound.violations == 0
        assert abs(bound.exponent - 0.98) <= 1e-12
        assert bound.M_empirical <= bound.M_theory
        # the normal component is -|xi - eta|^2 / 2
        assert abs(bound.fitted_exponent - 2.0) <= 1e-3
    other = domain.chart_at(-eta)
    with pytest.raises(hrl_py.ChartMismatchError):
        hrl_py.normal_component_bound(other, trace, eta, 0.49, 1.0)
    with pytest.raises(ValueError):
        hrl_py.normal_component_bound(chart, trace, eta, 0.49, 1.0, sampler=hrl_py.HolderSampler())


def test_propagation():
    assert hrl_py.qc_component_propagation((2.0, -0.5), 1.5) == (3.0, -0.5)
    with pytest.raises(ValueError):
        hrl_py.qc_component_propagation((2.0, -0.5), 0.5)
    iso = hrl_py.Isometry.identity(3)
    assert np.allclose(hrl_py.isometry_gradient_propagation([1.0, 2.0, 3.0], iso), [3.0 * math.sqrt(3)] * 3)
    with pytest.raises(ValueError):
        hrl_py.isometry_gradient_propagation([1.0, 2.0], iso)


def test_validate_delta():
    ball_map, domain = hrl_py.make_problem("zcz-0.3", 2)
    check = hrl_py.validate_delta(ball_map.trace(), domain.delta, domain.rho)
    assert check.ok
    assert check.max_jump <= 1.3 * domain.delta
    assert not hrl_py.validate_delta(ball_map.trace(), 1.0, domain.rho).ok
    with pytest.raises(hrl_py.ConfigurationError):
        hrl_py.validate_delta(ball_map.trace(), 0.2, None)


def test_transformed_domain():
    ball_map, domain = hrl_py.make_problem("zcz-0.3", 2)
    iso = hrl_py.Isometry.random(2, np.random.default_rng(3))
    moved = domain.transformed(iso)
    q = ball_map.trace()(np.array([[0.6, 0.8]]))
    assert np.all(moved.covers(iso.apply(q)))
    chart = moved.chart_at(iso.apply(q)[0])
    assert chart.verify_normalization()[2]


def run():
    test_isometry()
    test_normalize_at()
    test_sphere_chart()
    test_quadric_chart()
    test_chart_product_bound()
    test_paraboloid_c2()
    test_atlas_lookup()
    test_uniform_in_domain()
    test_normal_component_bound()
    test_propagation()
    test_validate_delta()
    test_transformed_domain()


if __name__ == "__main__":
    run()
