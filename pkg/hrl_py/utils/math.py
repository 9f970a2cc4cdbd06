"""Assorted utilities for math"""

import math
import numpy as np


def as_points(points, n=None):
    """Returns `points` as a float array of shape (N, n).

    A single point (1D input) becomes a batch of one."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError("Expected a point or a batch of points, got shape %s" % (arr.shape,))
    if n is not None and arr.shape[1] != n:
        raise ValueError("Expected points in R^%d, got R^%d" % (n, arr.shape[1]))
    return arr


def unit(v):
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("Cannot normalize vector %s" % list(v))
    return v / norm


def row_norms(arr):
    arr = np.asarray(arr, dtype=float)
    return np.sqrt(np.einsum("ij,ij->i", arr, arr))


def compensated_sum(values):
    """Sums `values` along the first axis.

    Each trailing entry is summed with :func:`math.fsum`, which is exactly
    rounded and so independent of the order the terms arrive in. The shape of
    the result is ``values.shape[1:]`` (a float for 1D input)."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        return math.fsum(arr)
    flat = arr.reshape(arr.shape[0], -1)
    out = np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])])
    return out.reshape(arr.shape[1:])


def householder_to_axis(vector, axis=-1):
    """Orthogonal (symmetric) matrix H with H @ unit(vector) = e_axis.

    Returns the identity when the vector already points along the axis."""
    u = unit(vector)
    e = np.zeros(len(u))
    e[axis] = 1.0
    w = u - e
    norm = np.linalg.norm(w)
    if norm < 1e-14:
        return np.eye(len(u))
    w /= norm
    return np.eye(len(u)) - 2.0 * np.outer(w, w)


def orthonormal_complement(vector):
    """(n, n-1) matrix whose columns span the orthogonal complement of `vector`."""
    H = householder_to_axis(vector, axis=-1)
    # H is symmetric, so H e_n = unit(vector) and the other columns are orthogonal to it
    return H[:, :-1]


def fd_step(points):
    """Per-point central-difference step max(1e-6, 1e-4 (1-|x|))."""
    r = row_norms(points)
    return np.maximum(1e-6, 1e-4 * (1.0 - np.minimum(r, 1.0)))


def fd_jacobian(func, points, step=None):
    """Central-difference Jacobians of a vectorized map.

    Args:
        func: maps an (N, n) array to an (N, m) array (or (N,) for scalars).
        points: (N, n) evaluation points.
        step: scalar or (N,) array of steps; defaults to :func:`fd_step`.
    Returns:
        (N, m, n) array."""
    points = as_points(points)
    N, n = points.shape
    h = fd_step(points) if step is None else np.broadcast_to(step, (N,)).astype(float)
    columns = []
    for j in range(n):
        shift = np.zeros((N, n))
        shift[:, j] = h
        plus = np.asarray(func(points + shift), dtype=float)
        minus = np.asarray(func(points - shift), dtype=float)
        diff = (plus - minus).reshape(N, -1)
        columns.append(diff / (2.0 * h[:, None]))
    return np.stack(columns, axis=-1)


def discrete_laplacian(func, points, h=1e-3):
    """Second-order central-difference Laplacian of a vectorized map, shape (N, m)."""
    points = as_points(points)
    N, n = points.shape
    center = np.asarray(func(points), dtype=float).reshape(N, -1)
    total = -2.0 * n * center
    for j in range(n):
        shift = np.zeros((N, n))
        shift[:, j] = h
        total += np.asarray(func(points + shift), dtype=float).reshape(N, -1)
        total += np.asarray(func(points - shift), dtype=float).reshape(N, -1)
    return total / (h * h)


def loglog_slope(x, y):
    """Least-squares slope of log y against log x, ignoring non-positive entries.

    Returns nan when fewer than two usable points remain."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if np.count_nonzero(keep) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def sphere_uniform(rng, count, n):
    g = rng.standard_normal((count, n))
    return g / row_norms(g)[:, None]


def ball_uniform(rng, count, n, r_max=1.0):
    directions = sphere_uniform(rng, count, n)
    radii = r_max * rng.random(count) ** (1.0 / n)
    return directions * radii[:, None]


def spiral_points(n, count):
    """Deterministic, well-spread points on S^{n-1}.

    n=2 gives equispaced angles starting at e_1, n=3 a Fibonacci spiral, and
    n=4 normalized Gaussians from a fixed seed."""
    if n == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if n == 3:
        k = np.arange(count) + 0.5
        z = 1.0 - 2.0 * k / count
        phi = np.pi * (3.0 - math.sqrt(5.0)) * np.arange(count)
        s = np.sqrt(1.0 - z * z)
        return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    return sphere_uniform(np.random.default_rng(0), count, n)
