"""
Inequalities on C^{1,alpha} boundary charts and the bounds they feed.

The chart inequality |grad Phi(zeta) - grad Phi(omega)| <= C2 |zeta - omega|^alpha
implies, by the mean value theorem and grad Phi(0) = 0,

    |Phi(zeta) - Phi(omega)| <= C2 |zeta - omega| (min(|zeta|, |omega|)^alpha + |zeta - omega|^alpha),

which :func:`chart_product_bound` evaluates. :func:`normal_component_bound`
uses it to show that the chart-frame normal component of a beta-Holder
boundary map is (1+alpha)beta-Holder at the anchor.
"""

import math
from collections import namedtuple

import numpy as np

from hrl_py.algorithms.regularity import HolderSampler
from hrl_py.framework.errors import ChartMismatchError, ConfigurationError
from hrl_py.framework.sphere import points_at_chords, sphere_coords
from hrl_py.representations.charts import estimate_c2
from hrl_py.utils.math import as_points, loglog_slope, row_norms, sphere_uniform

NormalComponentBound = namedtuple(
    "NormalComponentBound",
    ["M_empirical", "M_theory", "exponent", "violations", "fitted_exponent", "pair_count", "M_tilde"],
)

ChartSpotCheck = namedtuple(
    "ChartSpotCheck",
    ["c2_estimate", "c2_declared", "exceeds", "normalization_ok", "product_violations", "pair_count"],
)

DeltaCheck = namedtuple("DeltaCheck", ["ok", "max_jump", "threshold", "pair_count"])

# sup |F| is inflated by this factor before entering M_theory
M_TILDE_MARGIN = 1.05


def chart_product_bound(chart, zeta, omega):
    """Both sides of the product inequality for Phi at zeta and omega.

    Args:
        chart (GraphChart): chart with a declared C2.
        zeta, omega: points of O, single (m,) vectors or (N, m) batches.
    Returns:
        (lhs, rhs): floats for single points, arrays for batches.
    """
    single = np.ndim(zeta) == 1 and np.ndim(omega) == 1
    zeta = as_points(zeta, n=chart.n - 1)
    omega = as_points(omega, n=chart.n - 1)
    chart.require_domain(zeta)
    chart.require_domain(omega)
    if chart.c2 is None:
        raise ConfigurationError("Chart %s has no C2 constant" % chart.name)
    lhs = np.abs(chart.phi(zeta) - chart.phi(omega))
    gap = row_norms(zeta - omega)
    a = chart.alpha
    rhs = chart.c2 * gap * (np.minimum(row_norms(zeta) ** a, row_norms(omega) ** a) + gap**a)
    if single:
        return float(lhs[0]), float(rhs[0])
    return lhs, rhs


def uniform_in_domain(chart, count, rng):
    """Uniform points of the chart domain O."""
    m = chart.n - 1
    g = rng.standard_normal((count, m))
    g /= row_norms(g)[:, None]
    return g * (chart.radius * rng.random(count) ** (1.0 / m))[:, None]


def spot_check_chart(chart, c2=None, pairs=512, seed=0, tol=1e-10):
    """Estimates C2, checks the normalization and counts product-bound violations.

    `exceeds` is True when the estimate is above the declared constant `c2`
    (the chart's own by default)."""
    declared = chart.c2 if c2 is None else float(c2)
    estimate = estimate_c2(chart, pairs=pairs, seed=seed)
    _, _, normalized = chart.verify_normalization()
    rng = np.random.default_rng(seed)
    zeta = uniform_in_domain(chart, pairs, rng)
    omega = uniform_in_domain(chart, pairs, rng)
    lhs, rhs = chart_product_bound(chart, zeta, omega)
    violations = int(np.count_nonzero(lhs > rhs + tol))
    exceeds = declared is not None and estimate > declared
    return ChartSpotCheck(estimate, declared, bool(exceeds), bool(normalized), violations, pairs)


def sampled_sup(F, samples=4096, seed=0, transform=None):
    """sup |F| over uniform sphere samples, optionally after a map on values."""
    rng = np.random.default_rng(seed)
    values = F(sphere_uniform(rng, samples, F.n))
    if transform is not None:
        values = transform(values)
    return float(np.max(row_norms(values)))


def normal_component_bound(
    chart, F, eta, beta, c1, sampler=None, delta=0.2, M_tilde=None, graph_tol=1e-8
):
    """Holder bound of the chart-frame normal component of F at eta.

    With F~ = L o F and L the chart's isometry, checks

        |F~_n(xi) - F~_n(eta)| <= M |xi - eta|^{(1+alpha) beta}

    on sphere points anchored at eta, where
    M = max(C1^{1+alpha} C2, 2 M~ / delta^{(1+alpha) beta}) and M~ is the
    (inflated) sup of |F~|. Inside V(eta) = B(eta, delta) the sampled values
    must lie on the chart graph.

    Args:
        chart (GraphChart): chart anchored at F(eta).
        F (BoundaryData): vector trace, arity n.
        beta (float): Holder exponent of F with constant `c1`.
        sampler (HolderSampler): anchored pairs; anchored at eta by default.
        delta (float): radius of V(eta).
    Returns:
        NormalComponentBound; `M_empirical` is the tightest sampled constant,
        `violations` counts samples above M_theory and `fitted_exponent` is
        the log-log slope over chords <= 1/16.
    """
    if F.arity != chart.n:
        raise ValueError("Normal component needs a vector trace of arity %d" % chart.n)
    if chart.c2 is None:
        raise ConfigurationError("Chart %s has no C2 constant" % chart.name)
    eta = sphere_coords(eta, n=F.n)[0]
    q_local = chart.to_local(F.at(eta))[0]
    if np.linalg.norm(q_local) > graph_tol:
        raise ChartMismatchError(
            "F(eta)=%s is not the anchor of chart %s" % (list(F.at(eta)), chart.name)
        )
    if sampler is None:
        sampler = HolderSampler(pairs=1050, anchor=eta, levels=20)
    elif sampler.anchor is None:
        raise ValueError("The normal-component bound needs an anchored sampler")
    _, xi = sampler.sample(F.n)
    chords = row_norms(xi - eta[None, :])
    local = chart.to_local(F(xi))

    inside = chords < delta
    if np.any(inside):
        residual = chart.graph_residual(F(xi[inside]))
        if np.any(residual > graph_tol):
            i = int(np.argmax(residual))
            raise ChartMismatchError(
                "F(xi) at xi=%s lies %.3g off the graph of chart %s"
                % (list(xi[inside][i]), residual[i], chart.name)
            )

    alpha = chart.alpha
    exponent = (1.0 + alpha) * beta
    normal = np.abs(local[:, -1])
    if M_tilde is None:
        M_tilde = M_TILDE_MARGIN * sampled_sup(F, transform=chart.iso.apply)
    M_theory = max(c1 ** (1.0 + alpha) * chart.c2, 2.0 * M_tilde / delta**exponent)

    keep = chords > 0.0
    scaled = normal[keep] / chords[keep] ** exponent
    M_empirical = float(np.max(scaled)) if len(scaled) else 0.0
    violations = int(np.count_nonzero(scaled > M_theory * (1.0 + 1e-12)))

    nominal = np.repeat(sampler.dyadic_chords(), len(xi) // (sampler.levels + 1))
    fit_chords, peaks = [], []
    for c in sampler.dyadic_chords():
        if c <= 1.0 / 16.0:
            fit_chords.append(c)
            peaks.append(float(np.max(normal[nominal == c])))
    fitted = loglog_slope(fit_chords, peaks) if all(p > 0.0 for p in peaks) else float("inf")
    return NormalComponentBound(
        M_empirical,
        float(M_theory),
        float(exponent),
        violations,
        float(fitted),
        int(np.count_nonzero(keep)),
        float(M_tilde),
    )


def qc_component_propagation(bound, K):
    """Scales a normal-gradient bound C (1-r)^e by the distortion K.

    Args:
        bound: (C, e).
        K (float): distortion, K >= 1.
    Returns:
        (K C, e), the bound for the tangential components.
    """
    if K < 1.0:
        raise ValueError("Distortion K must be at least 1, got %s" % K)
    C, e = bound
    return K * C, e


def isometry_gradient_propagation(bounds, iso):
    """Component bounds for f = L^{-1} o f~ from component bounds of f~.

    Each component of f is a combination of the f~_k with coefficients from
    an orthogonal row, so Cauchy-Schwarz gives sqrt(n) max_k bound_k."""
    bounds = [float(b) for b in bounds]
    n = iso.n
    if len(bounds) != n:
        raise ValueError("Expected %d component bounds, got %d" % (n, len(bounds)))
    if n < 2:
        raise ValueError("Dimension must be at least 2")
    return [math.sqrt(n) * max(bounds)] * n


def validate_delta(F, delta, rho, pairs=2000, seed=0):
    """Samples the continuity condition |xi1 - xi2| < delta => |F(xi1) - F(xi2)| < rho/2."""
    if rho is None:
        raise ConfigurationError("validate_delta needs the target-side radius rho")
    if not delta > 0.0:
        raise ValueError("delta must be positive, got %s" % delta)
    rng = np.random.default_rng(seed)
    xi1 = sphere_uniform(rng, pairs, F.n)
    chords = delta * rng.random(pairs)
    xi2 = np.array([points_at_chords(p, [c], rng)[0] for p, c in zip(xi1, chords)])
    jumps = row_norms(F(xi1) - F(xi2))
    worst = float(np.max(jumps))
    return DeltaCheck(worst < 0.5 * rho, worst, 0.5 * rho, pairs)
