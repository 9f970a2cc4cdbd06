"""
Geometry of the unit sphere S^{n-1} and the unit ball B^n, the quadrature
rules used to integrate against the normalized surface measure, and the
zonal (one-coordinate) reduction of sphere integrals.

Two families of rules are provided. :func:`make_quadrature` builds the
product rules with a guaranteed polynomial exactness degree (trapezoid on
the circle, Gauss-Jacobi in the first coordinate times a rule on the lower
dimensional sphere otherwise). :func:`make_graded_quadrature` builds a
product rule in polar coordinates about a center point whose polar panels
shrink geometrically towards the center; it is what resolves Poisson
kernels peaked near the boundary.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from hrl_py.framework.errors import DomainError, QuadratureError, UnsupportedDimensionError
from hrl_py.utils.math import as_points, compensated_sum, orthonormal_complement, row_norms

SUPPORTED_DIMENSIONS = (2, 3, 4)

# Graded rule defaults
PANEL_ORDER = 16
INNER_LEVELS = 12
AZIMUTH_DEGREE = 16
MAX_PANEL_WIDTH = 0.5


def check_dimension(n):
    if n not in SUPPORTED_DIMENSIONS:
        raise UnsupportedDimensionError(n, SUPPORTED_DIMENSIONS)


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


class SpherePoint:
    """A unit vector on S^{n-1}. Coordinates are renormalized on construction."""

    __slots__ = ("_coords",)

    def __init__(self, coords):
        arr = np.array(coords, dtype=float).ravel()
        if arr.size < 2:
            raise DomainError("Sphere points need dimension n >= 2, got %d" % arr.size)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0 or not math.isfinite(norm):
            raise DomainError("Cannot place %s on the unit sphere" % list(arr))
        self._coords = _frozen(arr / norm)

    @classmethod
    def axis(cls, n, j=0, sign=1.0):
        e = np.zeros(n)
        e[j] = sign
        return cls(e)

    @property
    def coords(self):
        return self._coords

    @property
    def n(self):
        return len(self._coords)

    def chord(self, other):
        """Euclidean distance |self - other|."""
        return float(np.linalg.norm(self._coords - np.asarray(other, dtype=float)))

    def __array__(self, dtype=None, copy=None):
        return np.array(self._coords, dtype=dtype)

    def __len__(self):
        return len(self._coords)

    def __eq__(self, other):
        if isinstance(other, SpherePoint):
            return np.array_equal(self._coords, other._coords)
        return False

    def __hash__(self):
        return hash(tuple(self._coords))

    def __str__(self):
        return "(%s)" % ", ".join("%.6g" % c for c in self._coords)

    def __repr__(self):
        return "SpherePoint(%s)" % list(self._coords)


class BallPoint:
    """An interior point x of B^n, |x| < 1 strictly."""

    __slots__ = ("_coords",)

    def __init__(self, coords):
        arr = np.array(coords, dtype=float).ravel()
        if arr.size < 2:
            raise DomainError("Ball points need dimension n >= 2, got %d" % arr.size)
        r = float(np.linalg.norm(arr))
        if not r < 1.0:
            raise DomainError("Point %s is not inside the unit ball (|x|=%.17g)" % (list(arr), r))
        self._coords = _frozen(arr)

    @classmethod
    def on_ray(cls, eta, r):
        return cls(float(r) * np.asarray(eta, dtype=float))

    @property
    def coords(self):
        return self._coords

    @property
    def n(self):
        return len(self._coords)

    @property
    def r(self):
        return float(np.linalg.norm(self._coords))

    @property
    def direction(self):
        """x/|x| as a SpherePoint, or None at the origin."""
        if self.r == 0.0:
            return None
        return SpherePoint(self._coords)

    def __array__(self, dtype=None, copy=None):
        return np.array(self._coords, dtype=dtype)

    def __len__(self):
        return len(self._coords)

    def __eq__(self, other):
        if isinstance(other, BallPoint):
            return np.array_equal(self._coords, other._coords)
        return False

    def __hash__(self):
        return hash(tuple(self._coords))

    def __repr__(self):
        return "BallPoint(%s)" % list(self._coords)


def ball_coords(x):
    """Coordinates of an interior point as a 1D array; raises DomainError if |x| >= 1."""
    if isinstance(x, BallPoint):
        return np.array(x.coords)
    arr = np.array(x, dtype=float).ravel()
    r = float(np.linalg.norm(arr))
    if not r < 1.0:
        raise DomainError("Point %s is not inside the unit ball (|x|=%.17g)" % (list(arr), r))
    return arr


def sphere_coords(xi, n=None):
    """Unit vectors as an (N, n) array (a single point becomes a batch of one)."""
    if isinstance(xi, SpherePoint):
        return np.array(xi.coords)[None, :]
    arr = as_points(xi, n=n)
    norms = row_norms(arr)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise DomainError("Sphere points must be finite and non-zero")
    return arr / norms[:, None]


class QuadratureRule:
    """Nodes on S^{n-1} with positive weights summing to 1.

    Args:
        nodes (array): (N, n) unit vectors.
        weights (array): (N,) positive weights, summing to 1 within 1e-12.
        degree (int): total polynomial degree integrated exactly.
        name (str): label used in reports.
    """

    def __init__(self, nodes, weights, degree, name=None):
        nodes = as_points(nodes)
        weights = np.asarray(weights, dtype=float).ravel()
        if len(weights) != len(nodes):
            raise ValueError("%d nodes but %d weights" % (len(nodes), len(weights)))
        if len(weights) == 0:
            raise ValueError("A quadrature rule needs at least one node")
        if np.any(weights <= 0.0):
            raise ValueError("Quadrature weights must be positive")
        total = math.fsum(weights)
        if abs(total - 1.0) > 1e-12:
            raise ValueError("Quadrature weights sum to %.17g, expected 1" % total)
        if np.max(np.abs(row_norms(nodes) - 1.0)) > 1e-12:
            raise ValueError("Quadrature nodes must be unit vectors")
        self._nodes = _frozen(nodes)
        self._weights = _frozen(weights)
        self.degree = int(degree)
        self.name = name if name is not None else "rule(n=%d)" % nodes.shape[1]

    @property
    def nodes(self):
        return self._nodes

    @property
    def weights(self):
        return self._weights

    @property
    def n(self):
        return self._nodes.shape[1]

    @property
    def size(self):
        return len(self._weights)

    def integrate(self, values):
        """Compensated sum of weight * value over the nodes.

        `values` has the nodes along its first axis; any trailing shape is kept."""
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.size:
            raise ValueError("Expected %d node values, got %d" % (self.size, values.shape[0]))
        w = self._weights.reshape((-1,) + (1,) * (values.ndim - 1))
        return compensated_sum(w * values)

    def integrate_function(self, func):
        return self.integrate(func(self._nodes))

    def __len__(self):
        return self.size

    def __repr__(self):
        return "QuadratureRule(%s, size=%d, degree=%d)" % (self.name, self.size, self.degree)


def _product_rule(n, degree):
    if n == 2:
        count = degree + 1
        theta = 2.0 * np.pi * np.arange(count) / count
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        return nodes, np.full(count, 1.0 / count)
    q = degree // 2 + 1
    a = (n - 3) / 2.0
    t, w = roots_jacobi(q, a, a)
    w = w / math.fsum(w)
    inner_nodes, inner_weights = _product_rule(n - 1, degree)
    m = len(inner_weights)
    s = np.sqrt(1.0 - t * t)
    nodes = np.empty((q * m, n))
    nodes[:, 0] = np.repeat(t, m)
    nodes[:, 1:] = (s[:, None, None] * inner_nodes[None, :, :]).reshape(-1, n - 1)
    weights = np.outer(w, inner_weights).ravel()
    return nodes, weights


@lru_cache(maxsize=None)
def make_quadrature(n, degree):
    """Product rule on S^{n-1} exact for polynomials of total degree <= `degree`.

    n=2 is the equispaced trapezoid rule with degree+1 nodes. For n >= 3 the
    first coordinate t uses Gauss-Jacobi nodes for the weight (1-t^2)^{(n-3)/2}
    and the remaining coordinates sqrt(1-t^2) * zeta use the rule on S^{n-2}."""
    check_dimension(n)
    if int(degree) != degree or degree < 1:
        raise ValueError("Quadrature degree must be a positive integer, got %s" % degree)
    nodes, weights = _product_rule(n, int(degree))
    weights = weights / math.fsum(weights)
    return QuadratureRule(nodes, weights, degree, name="product(n=%d, degree=%d)" % (n, degree))


def required_degree(r):
    """Uniform-rule degree needed to resolve the Poisson kernel at radius r."""
    if not 0.0 <= r < 1.0:
        raise DomainError("Radius %s outside [0, 1)" % r)
    return int(math.ceil(8.0 / (1.0 - r)))


class ZonalWeight:
    """The weight (1-t^2)^{(n-3)/2} of the zonal reduction and its normalization.

    The normalization constant is obtained from the zeroth moment of the
    Gauss-Jacobi rule for the same weight, so that
    ``normalization * integral(weight) == 1``."""

    def __init__(self, n, order=32):
        check_dimension(n)
        self.n = n
        self.exponent = (n - 3) / 2.0
        _, w = roots_jacobi(order, self.exponent, self.exponent)
        self.normalization = 1.0 / math.fsum(w)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return self.normalization * (1.0 - t * t) ** self.exponent

    def __repr__(self):
        return "ZonalWeight(n=%d, c_n=%.17g)" % (self.n, self.normalization)


@lru_cache(maxsize=64)
def _zonal_nodes(n, quad_order):
    if n == 2:
        # midpoint rule in the polar angle, exact for cosine polynomials of degree < 2q
        theta = np.pi * (np.arange(quad_order) + 0.5) / quad_order
        return _frozen(np.cos(theta)), _frozen(np.full(quad_order, 1.0 / quad_order))
    a = (n - 3) / 2.0
    t, w = roots_jacobi(quad_order, a, a)
    return _frozen(t), _frozen(ZonalWeight(n).normalization * w)


def _panel_edges(width, inner_levels):
    if not width > 0.0:
        raise ValueError("Peak width must be positive, got %s" % width)
    width = min(width, MAX_PANEL_WIDTH)
    edges = [0.0] + [width * 2.0**-j for j in range(inner_levels, -1, -1)]
    while edges[-1] < np.pi:
        step = min(edges[-1], MAX_PANEL_WIDTH)
        edges.append(min(edges[-1] + step, np.pi))
    return np.array(edges)


@lru_cache(maxsize=256)
def _graded_polar_rule(n, width, panel_order, inner_levels):
    """Polar angles in [0, pi] and normalized weights for the measure sin^{n-2}(theta)."""
    edges = _panel_edges(width, inner_levels)
    x, w = roots_legendre(panel_order)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    theta = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel() * np.sin(theta) ** (n - 2)
    weights = weights / math.fsum(weights)
    return _frozen(theta), _frozen(weights)


def make_graded_quadrature(
    n,
    center,
    width,
    panel_order=PANEL_ORDER,
    inner_levels=INNER_LEVELS,
    azimuth_degree=AZIMUTH_DEGREE,
):
    """Product rule in polar coordinates about `center`, graded towards it.

    The polar angle is split into Gauss-Legendre panels with edges
    0, w 2^-L, ..., w/2, w, 2w, 4w, ... (panel width capped at 0.5), then
    uniform panels up to pi. Azimuths use the S^{n-2} product rule of degree
    `azimuth_degree` (the two points +-1 when n=2).

    Args:
        n (int): dimension.
        center: unit vector the rule is refined around.
        width (float): size of the finest unrefined panel, usually (1-r)/2.
    Returns:
        QuadratureRule
    """
    check_dimension(n)
    eta = sphere_coords(center, n=n)[0]
    theta, w_theta = _graded_polar_rule(n, float(width), int(panel_order), int(inner_levels))
    if n == 2:
        zeta = np.array([[1.0], [-1.0]])
        w_zeta = np.array([0.5, 0.5])
    else:
        inner = make_quadrature(n - 1, azimuth_degree)
        zeta, w_zeta = inner.nodes, inner.weights
    directions = zeta @ orthonormal_complement(eta).T
    nodes = (
        np.cos(theta)[:, None, None] * eta[None, None, :]
        + np.sin(theta)[:, None, None] * directions[None, :, :]
    ).reshape(-1, n)
    weights = np.outer(w_theta, w_zeta).ravel()
    weights = weights / math.fsum(weights)
    return QuadratureRule(
        nodes,
        weights,
        degree=azimuth_degree,
        name="graded(n=%d, width=%.3g)" % (n, width),
    )


def _evaluate_finite(g, t, label):
    values = np.asarray(g(t), dtype=float)
    if values.shape != t.shape:
        values = np.broadcast_to(values, t.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        where = float(t[np.argmax(bad)])
        raise QuadratureError(
            "Integrand is not finite at %s=%.17g" % (label, where), abscissa=where
        )
    return values


def zonal_integrate(n, g, quad_order=64, peak_width=None):
    """Integral over S^{n-1} of g(<xi, eta>) reduced to one dimension.

    Returns c_n * integral_{-1}^{1} g(t) (1-t^2)^{(n-3)/2} dt. For n >= 3 a
    Gauss-Jacobi rule is used, for n = 2 the circle is parametrized directly.
    When `peak_width` is given the integral is taken in the polar angle on
    the graded panels of :func:`make_graded_quadrature`, which resolves
    integrands concentrated near t = 1.

    Args:
        g (callable): vectorized function of t.
    """
    check_dimension(n)
    if peak_width is None:
        t, w = _zonal_nodes(n, int(quad_order))
    else:
        theta, w = _graded_polar_rule(n, float(peak_width), PANEL_ORDER, INNER_LEVELS)
        t = np.cos(theta)
    return compensated_sum(w * _evaluate_finite(g, t, "t"))


def zonal_integrate_chordal(n, h, peak_width):
    """Integral over S^{n-1} of h(|xi - eta|^2) on the graded polar rule.

    The squared chord is formed as 4 sin^2(theta/2) so that small chords keep
    full relative precision."""
    check_dimension(n)
    theta, w = _graded_polar_rule(n, float(peak_width), PANEL_ORDER, INNER_LEVELS)
    s2 = 4.0 * np.sin(0.5 * theta) ** 2
    return compensated_sum(w * _evaluate_finite(h, s2, "|xi-eta|^2"))


def geodesic_chord_identity(x, xi, eta=None):
    """Both sides of 1 + r^2 - 2r<xi,eta> = (1-r)^2 + r|xi-eta|^2 for x = r eta.

    Returns:
        (lhs, rhs) as floats; callers compare them."""
    x = np.asarray(x, dtype=float).ravel()
    r = float(np.linalg.norm(x))
    if eta is None:
        eta = x / r if r > 0.0 else SpherePoint.axis(len(x)).coords
    eta = sphere_coords(eta, n=len(x))[0]
    if np.linalg.norm(x - r * eta) > 1e-12 * max(1.0, r):
        raise DomainError("x=%s does not lie on the ray through eta=%s" % (list(x), list(eta)))
    xi = sphere_coords(xi, n=len(x))[0]
    lhs = 1.0 + r * r - 2.0 * r * float(np.dot(xi, eta))
    diff = xi - eta
    rhs = (1.0 - r) ** 2 + r * float(np.dot(diff, diff))
    return lhs, rhs


def points_at_chords(eta, chords, rng):
    """Random points of the sphere at the prescribed distances from `eta`.

    Args:
        eta: unit vector.
        chords (array): distances in (0, 2].
        rng (numpy.random.Generator): source of the random directions.
    Returns:
        (len(chords), n) array."""
    eta = sphere_coords(eta)[0]
    n = len(eta)
    chords = np.clip(np.asarray(chords, dtype=float), 0.0, 2.0)
    theta = 2.0 * np.arcsin(0.5 * chords)
    basis = orthonormal_complement(eta)
    if n == 2:
        zeta = rng.choice([-1.0, 1.0], size=(len(chords), 1))
    else:
        g = rng.standard_normal((len(chords), n - 1))
        zeta = g / row_norms(g)[:, None]
    directions = zeta @ basis.T
    return np.cos(theta)[:, None] * eta[None, :] + np.sin(theta)[:, None] * directions
