"""
Numerical checks of Holder regularity for Poisson extensions.

* :func:`holder_estimate` samples the Holder constant of boundary data.
* :func:`decay_profile` records |grad u(r eta)| along a radius together with
  the normalized values |grad u| (1-r)^{1-mu}, whose sup is the empirical
  constant of the gradient-decay bound for mu-Holder data.
* :func:`bounded_gradient_check` is the mu > 1 counterpart: the gradient
  stays bounded up to the boundary.
* :func:`radial_holder_from_gradient` integrates the radial derivative to
  recover |u(eta) - u(r eta)| and compares it with C (1-r)^mu / mu.
* :func:`global_holder_check` samples the Holder constant of u on the
  closed ball.
"""

import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import roots_legendre

from hrl_py.framework.errors import EmptySampleError
from hrl_py.framework.extension import HarmonicField
from hrl_py.framework.sphere import (
    ZonalWeight,
    points_at_chords,
    sphere_coords,
    zonal_integrate_chordal,
)
from hrl_py.utils.math import ball_uniform, compensated_sum, loglog_slope, row_norms, sphere_uniform
from hrl_py.utils.parallel import parallel_map

HolderEstimate = namedtuple("HolderEstimate", ["mu", "M", "pair_count", "argmax_pair"])

BoundedGradientResult = namedtuple(
    "BoundedGradientResult", ["sup_gradient", "monotone_tail", "samples", "accurate"]
)

ExplicitConstants = namedtuple("ExplicitConstants", ["small_r", "large_r"])

GlobalHolderResult = namedtuple(
    "GlobalHolderResult", ["global_M", "consistent", "boundary_M", "ratio", "radial_C", "pair_count"]
)

TAIL_RATIO_LIMIT = 10.0
# slope fits near the boundary use only radii with 1 - r <= TAIL_START
TAIL_START = 2.0**-4


@dataclass
class HolderSampler:
    """Pair-sampling configuration for Holder estimates on the sphere.

    With an `anchor` the pairs are (anchor, xi) with chords 2^-j,
    j = 0..levels, spread evenly over the levels. Without one, pairs are
    uniform random.

    Anchored samples hold (levels+1) * max(1, pairs // (levels+1)) pairs:
    every level gets at least one pair and the remainder is dropped, so the
    `pair_count` of an estimate can differ from `pairs`."""

    pairs: int = 2000
    anchor: Optional[object] = None
    levels: int = 24
    seed: int = 0

    def sample(self, n):
        rng = np.random.default_rng(self.seed)
        if self.pairs <= 0:
            return np.empty((0, n)), np.empty((0, n))
        if self.anchor is None:
            return sphere_uniform(rng, self.pairs, n), sphere_uniform(rng, self.pairs, n)
        eta = sphere_coords(self.anchor, n=n)[0]
        per_level = max(1, self.pairs // (self.levels + 1))
        chords = np.repeat(self.dyadic_chords(), per_level)
        others = points_at_chords(eta, chords, rng)
        return np.tile(eta, (len(others), 1)), others

    def dyadic_chords(self):
        return 2.0 ** -np.arange(self.levels + 1, dtype=float)


def _differences(F, a, b):
    diff = row_norms(F(a) - F(b))
    dist = row_norms(a - b)
    keep = dist > 0.0
    return diff[keep], dist[keep], a[keep], b[keep]


def holder_estimate(F, mu, sampler=None):
    """Sampled Holder constant sup |F(xi) - F(eta)| / |xi - eta|^mu.

    Args:
        F (BoundaryData): scalar or vector data (vector differences use the
            Euclidean norm).
        mu (float): exponent, mu > 0.
        sampler (HolderSampler): pairs to sample.
    Returns:
        HolderEstimate(mu, M, pair_count, argmax_pair); M is a lower bound
        for the true constant.
    """
    if not mu > 0.0:
        raise ValueError("Holder exponent must be positive, got %s" % mu)
    sampler = sampler if sampler is not None else HolderSampler()
    a, b = sampler.sample(F.n)
    if len(a) == 0:
        raise EmptySampleError("Holder estimate for '%s' has no pairs" % F.name)
    diff, dist, a, b = _differences(F, a, b)
    if len(dist) == 0:
        raise EmptySampleError("All sampled pairs of '%s' coincide" % F.name)
    ratio = diff / dist**mu
    i = int(np.argmax(ratio))
    return HolderEstimate(float(mu), float(ratio[i]), len(ratio), (tuple(a[i]), tuple(b[i])))


def anchored_constant(F, eta, mu, pairs=2000, levels=24, seed=0):
    """sup |F(xi) - F(eta)| / |xi - eta|^mu over dyadic chords and uniform xi."""
    eta = sphere_coords(eta, n=F.n)[0]
    dyadic = holder_estimate(F, mu, HolderSampler(pairs=pairs, anchor=eta, levels=levels, seed=seed)).M
    xi = sphere_uniform(np.random.default_rng(seed), pairs, F.n)
    diff, dist, _, _ = _differences(F, np.tile(eta, (pairs, 1)), xi)
    spread = float(np.max(diff / dist**mu)) if len(dist) else 0.0
    return max(dyadic, spread)


def anchored_exponent(F, sampler, max_chord=1.0 / 16.0):
    """Log-log slope of the per-level max of |F(xi) - F(eta)| against the chord.

    Only chords up to `max_chord` enter the fit. `sampler` must be anchored."""
    if sampler.anchor is None:
        raise ValueError("The exponent fit needs an anchored sampler")
    a, b = sampler.sample(F.n)
    diff = row_norms(F(a) - F(b))
    chords = np.repeat(sampler.dyadic_chords(), len(a) // (sampler.levels + 1))
    levels = [c for c in np.unique(chords) if c <= max_chord]
    peaks = [float(np.max(diff[chords == c])) for c in levels]
    return loglog_slope(levels, peaks)


def geometric_grid(k_max=10, density=1):
    """Radii with 1 - r = 2^{-k/density}, k = 0 .. k_max * density."""
    k = np.arange(k_max * density + 1, dtype=float)
    return 1.0 - 2.0 ** (-k / density)


def explicit_decay_constant(M, mu, n):
    """Explicit constants of the gradient-decay bound for 0 < mu < 1.

    small_r = M (2n+2) 2^{n+mu} holds for r < 1/2. For n >= 3 and r >= 1/2,
    large_r = M (2n+2) c_n 2^{(mu+n-3)/2} pi / cos(pi mu / 2), which comes from
    the closed form of the integral of s^mu / (1 + s^2) over (0, inf). The
    large-r constant is None for n = 2."""
    small = M * (2 * n + 2) * 2.0 ** (n + mu)
    if n < 3:
        return ExplicitConstants(small, None)
    c_n = ZonalWeight(n).normalization
    large = M * (2 * n + 2) * c_n * 2.0 ** ((mu + n - 3) / 2.0) * math.pi / math.cos(math.pi * mu / 2.0)
    return ExplicitConstants(small, large)


def explicit_gradient_bound(M, mu, n):
    """Explicit bound on |grad u(r eta)| for anchored mu-Holder data, mu > 1, n >= 3."""
    if not mu > 1.0:
        raise ValueError("The bounded-gradient constant needs mu > 1, got %s" % mu)
    if n < 3:
        raise ValueError("The explicit bounded-gradient constant needs n >= 3")
    small = M * (2 * n + 2) * 2.0 ** (n + mu)
    c_n = ZonalWeight(n).normalization
    large = M * (2 * n + 2) * c_n * 2.0 ** ((mu + n - 3) / 2.0) * 2.0 ** ((mu + 1) / 2.0) / (mu - 1.0)
    return max(small, large)


def gradient_majorant(M, mu, n, r):
    """M (2n+2) times the sphere integral of |xi-eta|^mu / ((1-r)^2 + r|xi-eta|^2)^{n/2}."""
    gap = (1.0 - r) ** 2

    def h(s2):
        return s2 ** (0.5 * mu) / (gap + r * s2) ** (0.5 * n)

    return (2 * n + 2) * M * zonal_integrate_chordal(n, h, peak_width=max(0.5 * (1.0 - r), 1e-300))


class DecayProfile:
    """|grad u(r eta)| sampled along one radius.

    Attributes:
        samples: list of (r, g).
        normalized: list of (r, g (1-r)^{1-mu}).
        fitted_slope: least-squares slope of log g against log(1-r) over the
            whole grid, diagnostic only.
        tail_slope: the same fit restricted to 1 - r <= TAIL_START (nan when
            fewer than two radii qualify).
        majorant: list of majorant values (or None).
        accurate: per-radius accuracy flags of the gradient quadrature.
        field: the HarmonicField the gradients were taken from.
    """

    def __init__(self, eta, mu, samples, holder_M=None, majorant=None, accurate=None, field=None):
        radii = np.array([r for r, _ in samples])
        if len(radii) == 0:
            raise EmptySampleError("A decay profile needs at least one radius")
        if np.any(np.diff(radii) <= 0.0) or radii[0] < 0.0 or radii[-1] >= 1.0:
            raise ValueError("Profile radii must increase strictly within [0, 1)")
        self.eta = sphere_coords(eta)[0]
        self.mu = float(mu)
        self.samples = [(float(r), float(g)) for r, g in samples]
        self.normalized = [(r, g * (1.0 - r) ** (1.0 - self.mu)) for r, g in self.samples]
        if not all(np.isfinite(v) for _, v in self.normalized):
            raise ValueError("Normalized gradient values must be finite")
        gaps = 1.0 - radii
        norms = np.array([g for _, g in self.samples])
        self.fitted_slope = loglog_slope(gaps, norms)
        tail = gaps <= TAIL_START
        self.tail_slope = loglog_slope(gaps[tail], norms[tail])
        self.holder_M = holder_M
        self.majorant = majorant
        self.accurate = list(accurate) if accurate is not None else [True] * len(samples)
        self.field = field

    @property
    def radii(self):
        return np.array([r for r, _ in self.samples])

    @property
    def gradient_norms(self):
        return np.array([g for _, g in self.samples])

    @property
    def empirical_C(self):
        """Grid sup of the normalized values."""
        return max(v for _, v in self.normalized)

    @property
    def all_accurate(self):
        return all(self.accurate)

    def small_radius_violations(self, M=None, n=None):
        """Radii r < 1/2 where the normalized value exceeds M (2n+2) 2^{n+mu}."""
        M = self.holder_M if M is None else M
        n = len(self.eta) if n is None else n
        bound = explicit_decay_constant(M, self.mu, n).small_r
        return [r for r, v in self.normalized if r < 0.5 and v > bound]

    def majorant_violations(self, rel_tol=1e-6):
        if self.majorant is None:
            return []
        return [
            r for (r, g), m in zip(self.samples, self.majorant) if g > m * (1.0 + rel_tol)
        ]

    def to_rows(self):
        rows = []
        for i, ((r, g), (_, v)) in enumerate(zip(self.samples, self.normalized)):
            m = self.majorant[i] if self.majorant is not None else float("nan")
            rows.append([r, g, v, m])
        return rows

    def __repr__(self):
        return "DecayProfile(mu=%g, radii=%d, C=%.6g, slope=%.4f)" % (
            self.mu,
            len(self.samples),
            self.empirical_C,
            self.fitted_slope,
        )


def _scalar(F):
    if F.arity != 1:
        raise ValueError("Expected scalar boundary data, '%s' has arity %d" % (F.name, F.arity))


def _anchored_M(F, eta, mu, holder_M):
    if holder_M is not None:
        return float(holder_M)
    return anchored_constant(F, eta, mu)


def _radial_gradients(field, eta, radii, threads=None):
    def norm_at(r):
        ev = field.evaluate_gradient(r * eta, anchor=eta)
        return float(np.linalg.norm(ev.value)), ev.accurate

    return parallel_map(norm_at, list(radii), threads=threads)


def decay_profile(F, eta, mu, r_grid=None, field=None, holder_M=None, with_majorant=True, threads=None):
    """Gradient-decay profile of u = P[F] along the radius through eta.

    Args:
        F (BoundaryData): scalar data, mu-Holder at eta.
        eta: boundary point.
        mu (float): exponent in (0, 1).
        r_grid (array): increasing radii, :func:`geometric_grid` by default.
        holder_M (float): anchored Holder constant at eta; sampled when omitted.
        with_majorant (bool): also evaluate the integral majorant at every r.
    Returns:
        DecayProfile
    """
    if not 0.0 < mu < 1.0:
        raise ValueError("Decay profiles need 0 < mu < 1, got %s" % mu)
    _scalar(F)
    eta = sphere_coords(eta, n=F.n)[0]
    radii = geometric_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    field = field if field is not None else HarmonicField(F)
    results = _radial_gradients(field, eta, radii, threads=threads)
    M = _anchored_M(F, eta, mu, holder_M)
    majorant = None
    if with_majorant:
        majorant = [gradient_majorant(M, mu, F.n, r) for r in radii]
    return DecayProfile(
        eta,
        mu,
        [(r, g) for r, (g, _) in zip(radii, results)],
        holder_M=M,
        majorant=majorant,
        accurate=[ok for _, ok in results],
        field=field,
    )


def bounded_gradient_check(F, eta, mu, r_grid=None, field=None, threads=None):
    """Sup of |grad u(r eta)| over the grid for mu > 1 data.

    The tail is flagged as bounded when the last value is less than ten
    times the median over the grid.

    Returns:
        BoundedGradientResult(sup_gradient, monotone_tail, samples, accurate)
    """
    if not mu > 1.0:
        raise ValueError("The bounded-gradient check needs mu > 1, got %s" % mu)
    _scalar(F)
    eta = sphere_coords(eta, n=F.n)[0]
    radii = geometric_grid(12) if r_grid is None else np.asarray(r_grid, dtype=float)
    field = field if field is not None else HarmonicField(F)
    results = _radial_gradients(field, eta, radii, threads=threads)
    norms = np.array([g for g, _ in results])
    median = float(np.median(norms))
    last = float(norms[-1])
    bounded = last <= TAIL_RATIO_LIMIT * median if median > 0.0 else last == 0.0
    return BoundedGradientResult(
        float(np.max(norms)),
        bool(bounded),
        [(float(r), float(g)) for r, g in zip(radii, norms)],
        all(ok for _, ok in results),
    )


class RadialHolderRow(namedtuple("RadialHolderRow", ["r", "path", "endpoint", "bound"])):
    """|u(eta) - u(r eta)| by path integration and by endpoint difference, with C(1-r)^mu/mu."""

    __slots__ = ()

    def holds(self, rel_tol=1e-9, abs_tol=1e-12):
        limit = self.bound * (1.0 + rel_tol) + abs_tol
        return self.path <= limit and self.endpoint <= limit

    def agreement(self):
        return abs(self.path - self.endpoint)


def _tail_integral(g1, g2, s1, mu):
    """Integral over [0, s1] of the fit a s^{mu-1} + b through (s1, g1), (2 s1, g2)."""
    if mu >= 1.0 - 1e-3:
        return g1 * s1
    p1, p2 = s1 ** (mu - 1.0), (2.0 * s1) ** (mu - 1.0)
    a = (g1 - g2) / (p1 - p2)
    b = g1 - a * p1
    return a * s1**mu / mu + b * s1


def radial_holder_from_gradient(profile, C=None, mu=None, s_min=2.0**-16, panel_order=8, threads=None):
    """Checks |u(eta) - u(r eta)| <= C (1-r)^mu / mu on the profile's radii.

    The left side is computed twice: by integrating <grad u(t eta), eta> over
    [r, 1) on dyadic Gauss-Legendre panels in s = 1 - t (down to `s_min`,
    with a fitted tail below it), and as the endpoint difference F(eta) - u(r eta).

    Args:
        profile (DecayProfile): supplies eta, the field and the radii.
        C (float): decay constant, the profile's empirical C by default.
        mu (float): exponent, the profile's mu by default.
    Returns:
        list of RadialHolderRow
    """
    if profile.field is None:
        raise ValueError("The profile carries no field to integrate")
    field = profile.field
    eta = profile.eta
    C = profile.empirical_C if C is None else float(C)
    mu = profile.mu if mu is None else float(mu)
    gaps = [1.0 - r for r in profile.radii]

    dyadic = [s_min * 2.0**j for j in range(int(math.log2(1.0 / s_min)) + 1)]
    edges = np.unique([s for s in dyadic + gaps if s >= s_min and s <= 1.0])
    x, w = roots_legendre(panel_order)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()

    def radial_derivative(s):
        return float(field.evaluate_gradient((1.0 - s) * eta, anchor=eta).value[0] @ eta)

    values = np.array(parallel_map(radial_derivative, list(nodes) + [s_min, 2.0 * s_min], threads=threads))
    g1, g2 = values[-2], values[-1]
    panels = (half[:, None] * w[None, :] * values[:-2].reshape(len(half), panel_order)).sum(axis=1)
    tail = _tail_integral(g1, g2, s_min, mu)
    cumulative = {float(edges[0]): tail}
    running = [tail]
    for k, s in enumerate(edges[1:]):
        running.append(panels[k])
        cumulative[float(s)] = compensated_sum(running)

    boundary_value = float(field.data.at(eta)[0])
    rows = []
    for r, s in zip(profile.radii, gaps):
        if s < s_min:
            path = abs(_tail_integral(g1, g2, s_min, mu) * (s / s_min) ** min(mu, 1.0))
        else:
            path = abs(cumulative[float(s)])
        endpoint = abs(boundary_value - float(field.evaluate(r * eta).value[0]))
        rows.append(RadialHolderRow(float(r), path, endpoint, C * s**mu / mu))
    return rows


def global_holder_check(F, mu, radial_C=None, sampler=None, field=None):
    """Sampled Holder constant of u = P[F] on the closed ball.

    A quarter of the pairs are interior/interior, a quarter interior/boundary,
    a quarter boundary/boundary and a quarter close interior pairs. Boundary
    values come from F.

    Returns:
        GlobalHolderResult(global_M, consistent, boundary_M, ratio, radial_C, pair_count)
    """
    sampler = sampler if sampler is not None else HolderSampler(pairs=400)
    if sampler.pairs <= 0:
        raise EmptySampleError("Global Holder check needs at least one pair")
    field = field if field is not None else HarmonicField(F)
    n = F.n
    rng = np.random.default_rng(sampler.seed)
    quarter = max(1, sampler.pairs // 4)

    def interior(count):
        return ball_uniform(rng, count, n, r_max=1.0 - 1e-9)

    def u(points):
        return np.array([field.evaluate(x).value for x in points])

    x1, y1 = interior(quarter), interior(quarter)
    x2, y2 = interior(quarter), sphere_uniform(rng, quarter, n)
    x3, y3 = sphere_uniform(rng, quarter, n), sphere_uniform(rng, quarter, n)
    x4 = interior(quarter) * 0.999
    step = rng.standard_normal((quarter, n))
    step *= (10.0 ** rng.uniform(-4.0, -2.0, size=quarter) / row_norms(step))[:, None]
    y4 = x4 + step
    y4 /= np.maximum(1.0, row_norms(y4) / (1.0 - 1e-9))[:, None]

    pairs = [
        (u(x1), u(y1), x1, y1),
        (u(x2), F(y2), x2, y2),
        (F(x3), F(y3), x3, y3),
        (u(x4), u(y4), x4, y4),
    ]
    ratios = []
    for fx, fy, x, y in pairs:
        dist = row_norms(x - y)
        keep = dist > 0.0
        ratios.append(row_norms(fx - fy)[keep] / dist[keep] ** mu)
    ratios = np.concatenate(ratios)
    global_M = float(np.max(ratios))
    boundary_M = holder_estimate(F, mu, HolderSampler(pairs=2000, seed=sampler.seed)).M
    if boundary_M > 0.0:
        ratio = global_M / boundary_M
    else:
        ratio = 0.0 if global_M == 0.0 else float("inf")
    return GlobalHolderResult(
        global_M,
        bool(np.isfinite(global_M)),
        boundary_M,
        ratio,
        radial_C,
        len(ratios),
    )
