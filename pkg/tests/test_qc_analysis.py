import numpy as np
import pytest

import hrl_py
from hrl_py.algorithms.qc_analysis import default_grid, sample_ball_pairs
from hrl_py.problems.gallery import circle_diffeo_trace, gallery_map, perturbed_cubic
from hrl_py.utils.math import ball_uniform, discrete_laplacian

description = "testing distortion measurement, Mori checks and the map gallery"


def test_gallery():
    assert "zcz-0.3" in hrl_py.gallery_names(2)
    assert "perturbed-cubic" in hrl_py.gallery_names(3)
    maps = hrl_py.gallery(2)
    assert [m.name for m in maps] == hrl_py.gallery_names(2)
    zcz = [m for m in maps if m.name == "zcz-0.3"][0]
    assert abs(hrl_py.distortion(zcz).K_global - 13.0 / 7.0) <= 1e-6
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        for name in hrl_py.gallery_names(n):
            ball_map, domain = hrl_py.make_problem(name, n)
            assert ball_map.n == n and domain.n == n
            assert domain.lipschitz_G is not None
    with pytest.raises(hrl_py.ConfigurationError):
        hrl_py.make_problem("no-such-map", 2)
    with pytest.raises(hrl_py.UnsupportedDimensionError):
        hrl_py.gallery_names(5)


def test_gallery_harmonic():
    grid = default_grid(2, radii=(0.3, 0.6), directions=4)
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        for name in hrl_py.gallery_names(n):
            ball_map = gallery_map(n, name)
            g = grid if n == 2 else default_grid(n, radii=(0.3, 0.6), directions=6)
            assert np.max(np.abs(discrete_laplacian(ball_map, g))) < 1e-4, name


def test_zcz_distortion():
    for c in (0.1, 0.3, 0.5):
        ball_map = gallery_map(2, "zcz-%g" % c)
        K = (1.0 + c) / (1.0 - c)
        analytic = hrl_py.distortion(ball_map)
        numeric = hrl_py.distortion(ball_map, analytic=False)
        assert abs(analytic.K_global - K) <= 1e-6
        assert abs(numeric.K_global - K) <= 1e-4
        assert abs(analytic.sup_gradient - (1.0 + c)) <= 1e-12
        beta = hrl_py.mori_exponent(analytic.K_global, 2)
        assert abs(beta - 1.0 / analytic.K_global) <= 1e-15


def test_distortion_report():
    report = hrl_py.distortion(hrl_py.BallMap.linear(np.eye(3)))
    assert len(report) == len(default_grid(3)) == 1 + 3 * 24
    assert abs(report.K_global - 1.0) <= 1e-12
    assert len(report.to_rows()[0]) == 3 + 3
    with pytest.raises(hrl_py.DegenerateJacobianError) as info:
        hrl_py.distortion(hrl_py.BallMap.linear(np.diag([1.0, 0.0])))
    assert info.value.sigma_min < 1e-10


def test_mori_exponent():
    assert hrl_py.mori_exponent(1.0, 3) == 1.0
    assert abs(hrl_py.mori_exponent(4.0, 3) - 0.5) <= 1e-15
    assert abs(hrl_py.mori_exponent(13.0 / 7.0, 2) - 7.0 / 13.0) <= 1e-15
    with pytest.raises(ValueError):
        hrl_py.mori_exponent(0.5, 2)


def test_mori_check():
    for c in (0.1, 0.3, 0.5):
        ball_map, domain = hrl_py.make_problem("zcz-%g" % c, 2)
        g = hrl_py.compose_inverse(domain.reference_map, ball_map)
        beta = hrl_py.mori_exponent(hrl_py.distortion(g).K_global, 2)
        check = hrl_py.mori_check(g, beta, {"pairs": 100000, "seed": 0})
        assert check.violations == 0
        assert check.pair_count > 99000
        assert 0.0 < check.M_empirical <= 2.0 ** (1.0 - beta) + 1e-12
        capped = hrl_py.mori_check(g, beta, {"pairs": 1000, "seed": 0}, cap=0.5 * check.M_empirical)
        assert capped.violations > 0


def test_mori_errors():
    shifted = hrl_py.BallMap.scaling(2, 0.5, center=[0.1, 0.0])
    with pytest.raises(ValueError):
        hrl_py.mori_check(shifted, 1.0, {"pairs": 100})
    with pytest.raises(hrl_py.NotSelfMapError):
        hrl_py.mori_check(hrl_py.BallMap.scaling(2, 2.0), 1.0, {"pairs": 100})


def test_ball_pairs():
    rng = np.random.default_rng(0)
    x, y = sample_ball_pairs(3, 1000, rng)
    assert np.all(np.linalg.norm(x, axis=1) <= 1.0)
    assert np.all(np.linalg.norm(y, axis=1) <= 1.0)
    close = np.linalg.norm(x - y, axis=1) <= 1e-3
    assert np.count_nonzero(close) >= 250


def test_ball_maps():
    f = perturbed_cubic(0.05)
    grid = default_grid(3, radii=(0.3, 0.9), directions=10)
    deviation, ok = f.check_jacobian(grid)
    assert ok and deviation <= 1e-5
    y = f(grid)
    assert np.max(np.abs(f.invert(y) - grid)) <= 1e-10

    iso = hrl_py.Isometry.random(3, np.random.default_rng(1))
    moved = f.compose_isometry(iso)
    assert np.allclose(moved(grid), iso.apply(y))
    assert np.allclose(moved.trace()(np.eye(3)), iso.apply(f(np.eye(3))))

    # the boundary-data map reproduces its trace near the sphere
    trace = circle_diffeo_trace()
    diffeo = hrl_py.BallMap.from_boundary_data(trace)
    xi = np.array([[0.6, 0.8]])
    assert np.allclose(diffeo(xi), trace(xi))
    assert np.allclose(diffeo(0.999999 * xi), trace(xi), atol=1e-4)


def test_isometry_invariance():
    f = gallery_map(2, "zcz-0.3")
    iso = hrl_py.Isometry.random(2, np.random.default_rng(5), scale=3.0)
    x = ball_uniform(np.random.default_rng(6), 50, 2)
    norms = np.linalg.norm(f.jacobian_at(x), ord=2, axis=(-2, -1))
    moved = np.linalg.norm(f.compose_isometry(iso).jacobian_at(x), ord=2, axis=(-2, -1))
    assert np.max(np.abs(norms - moved)) <= 1e-10


def run():
    test_gallery()
    test_gallery_harmonic()
    test_zcz_distortion()
    test_distortion_report()
    test_mori_exponent()
    test_mori_check()
    test_mori_errors()
    test_ball_pairs()
    test_ball_maps()
    test_isometry_invariance()


if __name__ == "__main__":
    run()
