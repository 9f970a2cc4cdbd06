"""
Quasiconformal distortion of ball maps and Holder checks of the Mori type.

The distortion at x is K(x) = sigma_max / sigma_min of the Jacobian, where
sigma_max is the operator norm |grad f(x)| and sigma_min = l(grad f(x)) is
the smallest stretch inf_{|h|=1} |f'(x) h|.
"""

from collections import namedtuple

import numpy as np

from hrl_py.framework.errors import DegenerateJacobianError, NotSelfMapError
from hrl_py.utils.math import ball_uniform, row_norms, spiral_points

DistortionSample = namedtuple("DistortionSample", ["x", "sigma_max", "sigma_min", "K"])

MoriCheck = namedtuple("MoriCheck", ["M_empirical", "violations", "pair_count", "argmax_pair"])

SINGULAR_FLOOR = 1e-10
SELF_MAP_TOL = 1e-9


class DistortionReport:
    """Per-sample singular values and the global distortion K = max K(x)."""

    def __init__(self, samples):
        self.samples = list(samples)
        self.K_global = max(s.K for s in self.samples)

    @property
    def sup_gradient(self):
        return max(s.sigma_max for s in self.samples)

    def to_rows(self):
        return [list(s.x) + [s.sigma_max, s.sigma_min, s.K] for s in self.samples]

    def __len__(self):
        return len(self.samples)

    def __repr__(self):
        return "DistortionReport(samples=%d, K_global=%.6f)" % (len(self.samples), self.K_global)


def default_grid(n, radii=(0.0, 0.3, 0.6, 0.9), directions=24):
    """Origin plus spiral directions on a few radial shells."""
    points = [np.zeros((1, n))]
    dirs = spiral_points(n, directions)
    for r in radii:
        if r > 0.0:
            points.append(r * dirs)
    return np.vstack(points)


def distortion(ball_map, sample_grid=None, analytic=True):
    """Singular values of the Jacobian at every sample point.

    Args:
        ball_map (BallMap): the map; finite differences are used when it has
            no analytic Jacobian or `analytic` is False.
        sample_grid (array): (N, n) interior points, :func:`default_grid` by default.
    Returns:
        DistortionReport
    """
    grid = default_grid(ball_map.n) if sample_grid is None else np.asarray(sample_grid, dtype=float)
    jac = ball_map.jacobian_at(grid, analytic=analytic)
    sigma = np.linalg.svd(jac, compute_uv=False)
    sigma_max, sigma_min = sigma[:, 0], sigma[:, -1]
    bad = sigma_min < SINGULAR_FLOOR
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DegenerateJacobianError(grid[i], float(sigma_min[i]))
    samples = [
        DistortionSample(tuple(x), float(smax), float(smin), float(smax / smin))
        for x, smax, smin in zip(grid, sigma_max, sigma_min)
    ]
    return DistortionReport(samples)


def mori_exponent(K, n):
    """beta = K^{1/(1-n)}."""
    if K < 1.0:
        raise ValueError("Distortion K must be at least 1, got %s" % K)
    if n < 2:
        raise ValueError("Dimension must be at least 2, got %s" % n)
    return float(K ** (1.0 / (1.0 - n)))


def sample_ball_pairs(n, pairs, rng, near_fraction=0.25, boundary_fraction=0.25):
    """Pairs of points in the closed ball: uniform, close (|x-y| <= 1e-3) and near the boundary."""
    near = int(pairs * near_fraction)
    edge = int(pairs * boundary_fraction)
    uniform = pairs - near - edge
    x = ball_uniform(rng, pairs, n)
    y = ball_uniform(rng, pairs, n)
    # close pairs
    step = rng.standard_normal((near, n))
    step *= (10.0 ** rng.uniform(-6.0, -3.0, size=near) / row_norms(step))[:, None]
    y[uniform : uniform + near] = x[uniform : uniform + near] + step
    # both points within 1e-3 of the sphere
    lo, hi = uniform + near, pairs
    for arr in (x, y):
        g = rng.standard_normal((edge, n))
        g /= row_norms(g)[:, None]
        arr[lo:hi] = g * (1.0 - 10.0 ** rng.uniform(-6.0, -3.0, size=edge))[:, None]
    # keep every point inside the closed ball
    for arr in (x, y):
        r = row_norms(arr)
        outside = r > 1.0
        arr[outside] /= r[outside][:, None]
    return x, y


def mori_check(ball_map, beta, sampler=None, cap=None):
    """Sampled Holder constant of a self-map of the ball fixing 0.

    Args:
        ball_map (BallMap): must send the ball into the closed ball.
        beta (float): Holder exponent.
        sampler (dict): {"pairs": int, "seed": int}; defaults to 10^5 pairs, seed 0.
        cap (float): constant to count violations against; defaults to the
            empirical constant itself.
    Returns:
        MoriCheck(M_empirical, violations, pair_count, argmax_pair)
    """
    origin = ball_map(np.zeros((1, ball_map.n)))[0]
    if np.linalg.norm(origin) > SELF_MAP_TOL:
        raise ValueError("Map '%s' does not fix the origin: f(0)=%s" % (ball_map.name, list(origin)))
    sampler = dict(sampler or {})
    pairs = int(sampler.get("pairs", 100000))
    rng = np.random.default_rng(sampler.get("seed", 0))
    x, y = sample_ball_pairs(ball_map.n, pairs, rng)
    fx, fy = ball_map(x), ball_map(y)
    for pts, img in ((x, fx), (y, fy)):
        norms = row_norms(img)
        if np.any(norms > 1.0 + SELF_MAP_TOL):
            i = int(np.argmax(norms))
            raise NotSelfMapError(pts[i], float(norms[i]))
    dist = row_norms(x - y)
    keep = dist > 0.0
    ratio = np.zeros(pairs)
    ratio[keep] = row_norms(fx - fy)[keep] / dist[keep] ** beta
    i = int(np.argmax(ratio))
    M = float(ratio[i])
    limit = M if cap is None else float(cap)
    violations = int(np.count_nonzero(ratio > limit * (1.0 + 1e-12)))
    return MoriCheck(M, violations, int(np.count_nonzero(keep)), (tuple(x[i]), tuple(y[i])))
