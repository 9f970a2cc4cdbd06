import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import hrl_py
from hrl_py.framework.sphere import ZonalWeight, ball_coords, points_at_chords, sphere_coords
from hrl_py.utils.math import sphere_uniform

description = "testing sphere points, quadrature rules and zonal integrals"


def test_points():
    xi = hrl_py.SpherePoint([3.0, 4.0])
    assert abs(np.linalg.norm(xi.coords) - 1.0) <= 1e-12
    assert np.allclose(xi.coords, [0.6, 0.8])
    assert xi == hrl_py.SpherePoint([6.0, 8.0])

    x = hrl_py.BallPoint.on_ray([0.0, 0.0, 1.0], 0.5)
    assert x.r == 0.5
    assert x.direction == hrl_py.SpherePoint.axis(3, 2)
    assert hrl_py.BallPoint([0.0, 0.0]).direction is None

    with pytest.raises(hrl_py.DomainError):
        hrl_py.BallPoint([0.6, 0.8])
    with pytest.raises(hrl_py.DomainError):
        hrl_py.SpherePoint([0.0, 0.0, 0.0])
    with pytest.raises(hrl_py.DomainError):
        ball_coords([1.0, 0.0, 0.0])
    assert sphere_coords([[2.0, 0.0], [0.0, -3.0]]).tolist() == [[1.0, 0.0], [0.0, -1.0]]


def test_rule_exactness():
    rule = hrl_py.make_quadrature(3, 12)
    assert abs(math.fsum(rule.weights) - 1.0) <= 1e-12
    assert np.all(rule.weights > 0)
    assert abs(rule.integrate_function(lambda p: p[:, 0] ** 2) - 1.0 / 3.0) <= 1e-10
    assert abs(rule.integrate_function(lambda p: p[:, 0] * p[:, 1])) <= 1e-10

    # E[xi_1^4] = 3 / (n (n + 2)) for the normalized measure
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        rule = hrl_py.make_quadrature(n, 8)
        assert abs(rule.integrate_function(lambda p: p[:, 0] ** 4) - 3.0 / (n * (n + 2))) <= 1e-10
        assert abs(rule.integrate_function(lambda p: p[:, 0] ** 2 * p[:, -1] ** 2) - 1.0 / (n * (n + 2))) <= 1e-10
        assert abs(rule.integrate_function(lambda p: p[:, 0] ** 3 * p[:, -1])) <= 1e-10


def test_rule_errors():
    with pytest.raises(hrl_py.UnsupportedDimensionError):
        hrl_py.make_quadrature(5, 4)
    with pytest.raises(ValueError):
        hrl_py.make_quadrature(3, 0)
    with pytest.raises(ValueError):
        hrl_py.QuadratureRule([[1.0, 0.0], [0.0, 1.0]], [0.5, 0.6], degree=1)
    with pytest.raises(ValueError):
        hrl_py.QuadratureRule([[1.0, 0.0], [0.0, 1.0]], [1.5, -0.5], degree=1)
    with pytest.raises(ValueError):
        hrl_py.QuadratureRule([[1.0, 0.0]], [0.5, 0.5], degree=1)


def test_required_degree():
    assert hrl_py.required_degree(0.0) == 8
    assert hrl_py.required_degree(0.5) == 16
    assert hrl_py.required_degree(0.75) == 32
    with pytest.raises(hrl_py.DomainError):
        hrl_py.required_degree(1.0)


def test_zonal_normalization():
    expected = {2: 1.0 / math.pi, 3: 0.5, 4: 2.0 / math.pi}
    for n, c_n in expected.items():
        assert abs(ZonalWeight(n).normalization - c_n) <= 1e-12
        assert abs(hrl_py.zonal_integrate(n, lambda t: np.ones_like(t)) - 1.0) <= 1e-12


def test_zonal_consistency():
    rng = np.random.default_rng(7)
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        rule = hrl_py.make_quadrature(n, 10)
        eta = sphere_uniform(rng, 1, n)[0]
        for _ in range(5):
            coeffs = rng.standard_normal(11)
            g = np.polynomial.Polynomial(coeffs)
            full = rule.integrate(g(rule.nodes @ eta))
            assert abs(hrl_py.zonal_integrate(n, g) - full) < 1e-8
            assert abs(hrl_py.zonal_integrate(n, g, peak_width=0.05) - full) < 1e-8


def test_zonal_chordal():
    # |xi - eta|^2 = 2 - 2t has mean 2
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        assert abs(hrl_py.zonal_integrate_chordal(n, lambda s2: s2, peak_width=0.1) - 2.0) <= 1e-10


def test_zonal_non_finite():
    with pytest.raises(hrl_py.QuadratureError) as info:
        hrl_py.zonal_integrate(3, lambda t: np.where(t > 0.99, np.inf, 1.0))
    assert info.value.abscissa is not None


def test_graded_rule():
    eta = np.array([0.0, 0.6, 0.8])
    rule = hrl_py.make_graded_quadrature(3, eta, 1e-3)
    assert abs(math.fsum(rule.weights) - 1.0) <= 1e-12
    assert abs(rule.integrate_function(lambda p: p[:, 2] ** 2) - 1.0 / 3.0) <= 1e-10
    # the Poisson kernel is sharply peaked at eta here
    x = 0.999 * eta
    assert abs(rule.integrate(hrl_py.poisson_kernel(x, rule.nodes)) - 1.0) <= 1e-8


@settings(max_examples=300, derandomize=True, deadline=None)
@given(
    st.sampled_from(hrl_py.SUPPORTED_DIMENSIONS),
    st.floats(min_value=0.0, max_value=0.999999),
    st.integers(min_value=0, max_value=2**31),
)
def test_chord_identity(n, r, seed):
    rng = np.random.default_rng(seed)
    eta, xi = sphere_uniform(rng, 2, n)
    lhs, rhs = hrl_py.geodesic_chord_identity(r * eta, xi, eta)
    assert abs(lhs - rhs) <= 1e-14 * 8.0 + 1e-14 * abs(rhs)


def test_chord_identity_off_ray():
    with pytest.raises(hrl_py.DomainError):
        hrl_py.geodesic_chord_identity([0.5, 0.0], [0.0, 1.0], eta=[0.0, 1.0])


def test_points_at_chords():
    rng = np.random.default_rng(3)
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        eta = hrl_py.SpherePoint.axis(n, n - 1).coords
        chords = 2.0 ** -np.arange(20, dtype=float)
        pts = points_at_chords(eta, chords, rng)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
        assert np.allclose(np.linalg.norm(pts - eta, axis=1), chords, rtol=1e-9)


def run():
    test_points()
    test_rule_exactness()
    test_rule_errors()
    test_required_degree()
    test_zonal_normalization()
    test_zonal_consistency()
    test_zonal_chordal()
    test_zonal_non_finite()
    test_graded_rule()
    test_chord_identity()
    test_chord_identity_off_ray()
    test_points_at_chords()


if __name__ == "__main__":
    run()
