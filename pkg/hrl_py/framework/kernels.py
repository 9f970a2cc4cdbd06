"""
Poisson kernel P(x, xi) of the unit ball and its x-gradient Q(x, xi).

All functions take one interior point x and a batch of sphere points; the
result is vectorized over the batch.
"""

from dataclasses import dataclass

import numpy as np

from hrl_py.framework.sphere import ball_coords, sphere_coords

# Beyond this radius d is formed from the chord to x/|x|
STABILIZE_RADIUS = 0.9


@dataclass(frozen=True)
class KernelValue:
    """Kernel values at one x for a batch of sphere points.

    Attributes:
        p: (N,) Poisson kernel values.
        q: (N, n) gradient kernel values.
        d: (N,) squared chordal quantity 1 + |x|^2 - 2<xi, x> = |x - xi|^2.
    """

    p: np.ndarray
    q: np.ndarray
    d: np.ndarray


def _chordal(x, nodes):
    r = float(np.linalg.norm(x))
    if r > STABILIZE_RADIUS:
        diff = nodes - x / r
        return (1.0 - r) ** 2 + r * np.einsum("ij,ij->i", diff, diff)
    return 1.0 + r * r - 2.0 * (nodes @ x)


def _one_minus_r2(x):
    r = float(np.linalg.norm(x))
    return (1.0 - r) * (1.0 + r)


def _bracket(x, nodes, d):
    n = len(x)
    return (-2.0 * x)[None, :] * d[:, None] - n * _one_minus_r2(x) * (x[None, :] - nodes)


def chordal_quantity(x, xi):
    """d = |x - xi|^2 for x in B and unit xi.

    Near the boundary d is evaluated as (1-r)^2 + r|xi - x/|x||^2, which is
    the same quantity without the cancellation in 1 + r^2 - 2<xi, x>."""
    x = ball_coords(x)
    return _chordal(x, sphere_coords(xi, n=len(x)))


def poisson_kernel(x, xi):
    """P(x, xi) = (1 - |x|^2) / |x - xi|^n, shape (N,)."""
    x = ball_coords(x)
    d = _chordal(x, sphere_coords(xi, n=len(x)))
    return _one_minus_r2(x) / d ** (0.5 * len(x))


def gradient_kernel(x, xi):
    """Q(x, xi) = grad_x P(x, xi), shape (N, n).

    Evaluated as the bounded bracket
    [(-2x) d - n (1 - |x|^2)(x - xi)] / d times d^{-n/2}."""
    x = ball_coords(x)
    nodes = sphere_coords(xi, n=len(x))
    d = _chordal(x, nodes)
    return (_bracket(x, nodes, d) / d[:, None]) * d[:, None] ** (-0.5 * len(x))


def evaluate_kernels(x, xi):
    x = ball_coords(x)
    n = len(x)
    nodes = sphere_coords(xi, n=n)
    d = _chordal(x, nodes)
    p = _one_minus_r2(x) / d ** (0.5 * n)
    q = (_bracket(x, nodes, d) / d[:, None]) * d[:, None] ** (-0.5 * n)
    return KernelValue(p=p, q=q, d=d)


def kernel_bound_certificate(x, xi):
    """Both sides of |Q(x, xi)| d^{n/2} <= 2n + 2.

    Returns:
        (lhs, rhs): lhs is an (N,) array, rhs the constant 2n + 2."""
    x = ball_coords(x)
    n = len(x)
    nodes = sphere_coords(xi, n=n)
    d = _chordal(x, nodes)
    lhs = np.linalg.norm(_bracket(x, nodes, d), axis=1) / d
    return lhs, 2.0 * n + 2.0
