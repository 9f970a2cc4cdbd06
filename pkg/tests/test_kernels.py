import numpy as np

import hrl_py
from hrl_py.utils.math import ball_uniform, sphere_uniform

description = "testing the Poisson kernel and its gradient"


def _rule(x):
    r = float(np.linalg.norm(x))
    center = x / r if r > 0 else np.eye(len(x))[-1]
    return hrl_py.make_graded_quadrature(len(x), center, 0.5 * (1.0 - r))


def test_chordal_quantity():
    rng = np.random.default_rng(0)
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        for x in ball_uniform(rng, 20, n, r_max=0.99):
            xi = sphere_uniform(rng, 50, n)
            d = hrl_py.chordal_quantity(x, xi)
            exact = np.sum((x[None, :] - xi) ** 2, axis=1)
            assert np.allclose(d, exact, rtol=1e-12, atol=1e-15)
    # near the boundary the stabilized form keeps relative precision
    eta = np.array([0.0, 0.0, 1.0])
    r = 1.0 - 1e-9
    assert abs(hrl_py.chordal_quantity(r * eta, eta)[0] - (1.0 - r) ** 2) <= 1e-14 * (1.0 - r) ** 2


def test_values():
    x = np.array([0.3, 0.2, 0.0])
    rule = hrl_py.make_quadrature(3, 40)
    assert abs(rule.integrate(hrl_py.poisson_kernel(x, rule.nodes)) - 1.0) <= 1e-8
    # P(0, xi) = 1
    assert np.allclose(hrl_py.poisson_kernel(np.zeros(3), rule.nodes), 1.0)
    kv = hrl_py.evaluate_kernels(x, rule.nodes)
    assert np.allclose(kv.p, hrl_py.poisson_kernel(x, rule.nodes))
    assert np.allclose(kv.q, hrl_py.gradient_kernel(x, rule.nodes))
    assert np.all(kv.p > 0)


def test_unit_mass_grid():
    for n in (2, 3):
        for x in ball_uniform(np.random.default_rng(n), 100, n, r_max=0.99):
            rule = _rule(x)
            assert abs(rule.integrate(hrl_py.poisson_kernel(x, rule.nodes)) - 1.0) <= 1e-8


def test_zero_mean():
    x = np.array([0.5, 0.0, 0.0])
    rule = _rule(x)
    assert np.linalg.norm(rule.integrate(hrl_py.gradient_kernel(x, rule.nodes))) <= 1e-8
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        for x in ball_uniform(np.random.default_rng(10 + n), 20, n, r_max=0.9):
            rule = _rule(x)
            assert np.linalg.norm(rule.integrate(hrl_py.gradient_kernel(x, rule.nodes))) < 1e-7


def test_finite_differences():
    x = np.array([0.4, 0.1, 0.2])
    xi = np.array([[1.0, 0.0, 0.0]])
    h = 1e-5
    q = hrl_py.gradient_kernel(x, xi)[0]
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        fd = (hrl_py.poisson_kernel(x + e, xi)[0] - hrl_py.poisson_kernel(x - e, xi)[0]) / (2 * h)
        assert abs(fd - q[j]) <= 1e-6 * max(1.0, abs(q[j]))

    rng = np.random.default_rng(1)
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        for x in ball_uniform(rng, 10, n, r_max=0.9):
            xi = sphere_uniform(rng, 5, n)
            q = hrl_py.gradient_kernel(x, xi)
            fd = np.empty_like(q)
            for j in range(n):
                e = np.zeros(n)
                e[j] = h
                fd[:, j] = (hrl_py.poisson_kernel(x + e, xi) - hrl_py.poisson_kernel(x - e, xi)) / (2 * h)
            scale = np.maximum(np.linalg.norm(q, axis=1), 1.0)
            assert np.all(np.linalg.norm(fd - q, axis=1) / scale < 1e-5)


def test_bound_certificate():
    rng = np.random.default_rng(2)
    violations = 0
    count = 0
    for n in hrl_py.SUPPORTED_DIMENSIONS:
        radii = 1.0 - 10.0 ** rng.uniform(-8.0, 0.0, size=400)
        for r, direction in zip(radii, sphere_uniform(rng, 400, n)):
            xi = sphere_uniform(rng, 100, n)
            # half of the nodes close to x/|x|
            xi[:50] = direction + 1e-3 * rng.standard_normal((50, n))
            lhs, rhs = hrl_py.kernel_bound_certificate(r * direction, xi)
            assert rhs == 2 * n + 2
            violations += int(np.count_nonzero(lhs > rhs))
            count += len(lhs)
    assert count >= 10**5
    assert violations == 0


def run():
    test_chordal_quantity()
    test_values()
    test_unit_mass_grid()
    test_zero_mean()
    test_finite_differences()
    test_bound_certificate()


if __name__ == "__main__":
    run()
