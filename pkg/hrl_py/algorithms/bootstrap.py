"""
The exponent bootstrap as an executable verifier.

Starting from the Holder exponent beta of a quasiconformal harmonic map f
(Mori's theorem applied to G^{-1} o f), every stage takes an exponent mu_k
and

1. bounds the chart-frame normal component of the boundary trace with
   exponent (1+alpha) mu_k at each sampled boundary point eta,
2. measures the gradient decay of that normal component along the radius
   through eta (or, once the exponent exceeds 1, its boundedness),
3. propagates the bound to every component through the distortion K and the
   chart isometry,
4. integrates the gradient radially and checks the upgraded Holder bound.

Stages follow the ladder mu_k = (1+alpha)^k beta until the exponent passes 1.
The pipeline ends with a Lipschitz certificate: the sup of the Jacobian
operator norm near the boundary, where it is attained since the operator
norm of a harmonic map's Jacobian is subharmonic.

Every check measures constants and compares them against the implications
with configurable slack; failures are recorded in the report, not raised.
"""

import math
from collections import namedtuple
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from hrl_py.algorithms.chart_bounds import (
    isometry_gradient_propagation,
    normal_component_bound,
    qc_component_propagation,
    spot_check_chart,
)
from hrl_py.algorithms.qc_analysis import default_grid, distortion, mori_check, mori_exponent
from hrl_py.algorithms.regularity import (
    HolderSampler,
    anchored_constant,
    anchored_exponent,
    bounded_gradient_check,
    decay_profile,
    geometric_grid,
    global_holder_check,
    radial_holder_from_gradient,
)
from hrl_py.framework.errors import ConfigurationError, HRLError
from hrl_py.framework.extension import HarmonicField
from hrl_py.framework.sphere import sphere_coords
from hrl_py.representations.ball_map import BallMap, compose_inverse
from hrl_py.utils.math import discrete_laplacian, spiral_points, unit
from hrl_py.utils.parallel import parallel_map

# beta is nudged when some rung of the ladder lands this close to 1
LADDER_TOL = 1e-9
NUDGE_FACTOR = 0.99
MAX_NUDGES = 5

InitialExponent = namedtuple(
    "InitialExponent", ["beta", "c1", "K_prime", "mori_M", "K_map", "reference"]
)

StageRecord = namedtuple(
    "StageRecord",
    [
        "k",
        "mu_in",
        "mu_out",
        "M",
        "M_theory",
        "decay_C",
        "component_bound",
        "holder_M",
        "fitted_exponent",
        "map_exponent",
        "accurate",
    ],
)

EtaRow = namedtuple(
    "EtaRow",
    [
        "stage",
        "eta",
        "q",
        "M_empirical",
        "M_theory",
        "exponent",
        "fitted_exponent",
        "map_exponent",
        "decay_C",
        "accurate",
    ],
)

StageFailure = namedtuple("StageFailure", ["stage", "eta", "reason", "detail"])

Certificate = namedtuple("Certificate", ["estimate", "sup_sampled", "direction", "radius"])


class ExponentLadder:
    """mu_k = (1+alpha)^k beta for k = 0 .. k0+1, with mu_k0 < 1 < mu_{k0+1}."""

    def __init__(self, alpha, beta, beta_raw, mus, nudges):
        self.alpha = alpha
        self.beta = beta
        self.beta_raw = beta_raw
        self.mus = list(mus)
        self.nudges = nudges

    @property
    def k0(self):
        return len(self.mus) - 2

    @property
    def final(self):
        return self.mus[-1]

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "beta_raw": self.beta_raw,
            "mus": self.mus,
            "k0": self.k0,
            "nudges": self.nudges,
        }

    def __repr__(self):
        return "ExponentLadder(alpha=%g, beta=%g, k0=%d, mus=%s)" % (
            self.alpha,
            self.beta,
            self.k0,
            ["%.6g" % m for m in self.mus],
        )


def _rungs(alpha, beta):
    mus = [beta]
    while mus[-1] < 1.0 + LADDER_TOL:
        mus.append(mus[-1] * (1.0 + alpha))
    return mus


def make_ladder(alpha, beta):
    """The exponent ladder for boundary regularity alpha and initial exponent beta.

    When a rung lands on 1 (within 1e-9) beta is multiplied by 0.99, at most
    five times, and the adjustment is recorded in `nudges`.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1], got %s" % alpha)
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1), got %s" % beta)
    beta_raw = beta
    nudges = 0
    while any(abs(mu - 1.0) <= LADDER_TOL for mu in _rungs(alpha, beta)):
        if nudges == MAX_NUDGES:
            raise ValueError("Could not move the ladder for beta=%s off 1" % beta_raw)
        beta *= NUDGE_FACTOR
        nudges += 1
    if beta <= 0.0:
        raise ValueError("Adjusted beta is not positive")
    return ExponentLadder(alpha, beta, beta_raw, _rungs(alpha, beta), nudges)


def reference_map(ball_map, domain):
    """The reference map G of the domain, or a scaling about f(0) by its Lipschitz constant."""
    if domain.lipschitz_G is None:
        raise ConfigurationError("Domain %s has no Lipschitz constant for G" % domain.name)
    if domain.reference_map is not None:
        return domain.reference_map
    center = ball_map(np.zeros((1, ball_map.n)))[0]
    return BallMap.scaling(ball_map.n, domain.lipschitz_G, center=center, name="G")


def initial_exponent(ball_map, domain, grid=None, pairs=20000, seed=0):
    """(beta, C1) for |f(x) - f(y)| <= C1 |x - y|^beta.

    K' is the distortion of g = G^{-1} o f (times the declared distortion of
    G when G is only known through its Lipschitz constant), beta = K'^{1/(1-n)}
    and C1 is the Mori constant of g, sampled, times the Lipschitz constant
    of G.

    Returns:
        InitialExponent(beta, c1, K_prime, mori_M, K_map, reference)
    """
    G = reference_map(ball_map, domain)
    g = compose_inverse(G, ball_map)
    K_prime = distortion(g, grid).K_global
    if domain.reference_map is None:
        K_prime *= domain.reference_distortion
    beta = mori_exponent(K_prime, ball_map.n)
    mori = mori_check(g, beta, {"pairs": pairs, "seed": seed})
    K_map = distortion(ball_map, grid).K_global
    return InitialExponent(beta, mori.M_empirical * domain.lipschitz_G, K_prime, mori.M_empirical, K_map, G.name)


@dataclass
class BootstrapConfig:
    """Grids, sample sizes and slacks of :func:`bootstrap_verify`."""

    k_max: int = 10
    final_k_max: int = 12
    slack: float = 0.05
    constant_slack: float = 0.05
    beta_cap: float = 0.49
    eta_count: int = 16
    holder_pairs: int = 1050
    holder_levels: int = 20
    mori_pairs: int = 20000
    global_pairs: int = 64
    radial_s_min: float = 2.0**-16
    radial_panel_order: int = 6
    radial_tol: float = 1e-5
    laplacian_tol: float = 1e-4
    coverage_tol: float = 1e-8
    certificate_directions: int = 512
    certificate_depth: int = 12
    certificate_margin: float = 1e-3
    seed: int = 0
    threads: Optional[int] = None
    progress: bool = False

    def to_dict(self):
        return asdict(self)


def operator_norms(ball_map, points):
    """Largest singular value of the Jacobian at each point."""
    return np.linalg.norm(ball_map.jacobian_at(points), ord=2, axis=(-2, -1))


def lipschitz_certificate(ball_map, directions=512, depth=12, margin=1e-3):
    """Upper estimate of sup |Df| over the ball.

    The operator norm is sampled on spiral directions at r = 1 - 2^{-depth},
    the best direction is refined with Nelder-Mead and the sup is inflated
    by (1 + margin)."""
    n = ball_map.n
    r = 1.0 - 2.0**-depth
    dirs = spiral_points(n, directions)
    norms = operator_norms(ball_map, r * dirs)
    best = int(np.argmax(norms))

    def objective(v):
        return -float(operator_norms(ball_map, r * unit(v)[None, :])[0])

    opt_res = optimize.minimize(
        objective,
        dirs[best],
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 400},
    )
    refined = -float(opt_res.fun)
    if refined > norms[best]:
        sup, direction = refined, unit(opt_res.x)
    else:
        sup, direction = float(norms[best]), dirs[best]
    return Certificate(sup * (1.0 + margin), sup, tuple(direction), r)


def _certificate(ball_map, config):
    return lipschitz_certificate(
        ball_map,
        directions=config.certificate_directions,
        depth=config.certificate_depth,
        margin=config.certificate_margin,
    )


class _EtaContext:
    """Per-boundary-point state shared by every stage."""

    def __init__(self, eta, q, chart, trace):
        self.eta = eta
        self.q = q
        self.chart = chart
        iso = chart.iso
        self.normal = trace.map(lambda v: iso.apply(v)[:, -1], arity=1, name="normal(%s)" % trace.name)
        self.field = HarmonicField(self.normal)


class BootstrapReport:
    """Outcome of :func:`bootstrap_verify`.

    `ladder` and `initial` are None when the initial exponent could not be
    measured; the failure is recorded and no stage runs.

    Attributes:
        stages (list): StageRecord per ladder stage.
        eta_rows (list): EtaRow per (stage, eta).
        final_sup_gradient (float): sup of |grad f~_n| on the final stage.
        chain_bound (float): sqrt(n) K final_sup_gradient, the bound the
            stages prove for every component.
        certificate (Certificate): the Lipschitz certificate.
        flags (dict): accuracy and consistency flags.
        failures (list): StageFailure records.
    """

    def __init__(
        self,
        map_name,
        domain_name,
        ladder,
        initial,
        stages,
        eta_rows,
        final_sup_gradient,
        chain_bound,
        certificate,
        flags,
        failures,
        config,
    ):
        self.map_name = map_name
        self.domain_name = domain_name
        self.ladder = ladder
        self.initial = initial
        self.stages = stages
        self.eta_rows = eta_rows
        self.final_sup_gradient = final_sup_gradient
        self.chain_bound = chain_bound
        self.certificate = certificate
        self.flags = flags
        self.failures = failures
        self.config = config

    @property
    def lipschitz_estimate(self):
        return self.certificate.estimate

    @property
    def passed(self):
        return not self.failures

    @property
    def accurate(self):
        return bool(self.flags.get("accurate", True))

    def stage_rows(self):
        return [list(s) for s in self.stages]

    def to_json(self):
        return {
            "map": self.map_name,
            "domain": self.domain_name,
            "passed": self.passed,
            "ladder": None if self.ladder is None else self.ladder.to_dict(),
            "initial": None if self.initial is None else self.initial._asdict(),
            "stages": [s._asdict() for s in self.stages],
            "eta_rows": [
                dict(row._asdict(), eta=list(row.eta), q=list(row.q)) for row in self.eta_rows
            ],
            "final_sup_gradient": self.final_sup_gradient,
            "chain_bound": self.chain_bound,
            "lipschitz_estimate": self.lipschitz_estimate,
            "certificate": dict(self.certificate._asdict(), direction=list(self.certificate.direction)),
            "flags": self.flags,
            "failures": [
                dict(f._asdict(), eta=None if f.eta is None else list(f.eta)) for f in self.failures
            ],
            "config": self.config.to_dict(),
        }

    def __repr__(self):
        return "BootstrapReport(%s, stages=%d, L=%.6g, %s)" % (
            self.map_name,
            len(self.stages),
            self.lipschitz_estimate,
            "passed" if self.passed else "%d failures" % len(self.failures),
        )


def _harmonic_check(ball_map, tol):
    grid = default_grid(ball_map.n, radii=(0.0, 0.3, 0.6), directions=8)
    worst = float(np.max(np.abs(discrete_laplacian(ball_map, grid))))
    return worst, worst <= tol


def _eta_stage(ctx, k, ladder, c1, trace, domain, K, config):
    """One stage at one boundary point: (row, failures, decay bound)."""
    mu, e = ladder.mus[k], ladder.mus[k + 1]
    failures = []
    eta = ctx.eta
    sampler = HolderSampler(
        pairs=config.holder_pairs, anchor=eta, levels=config.holder_levels, seed=config.seed
    )
    nb = normal_component_bound(ctx.chart, trace, eta, mu, c1, sampler=sampler, delta=domain.delta)
    if nb.violations:
        failures.append(StageFailure(k, eta, "normal-bound", "%d samples above M=%.6g" % (nb.violations, nb.M_theory)))
    if nb.fitted_exponent < e - config.slack:
        failures.append(
            StageFailure(k, eta, "normal-exponent", "fitted %.4f < %.4f" % (nb.fitted_exponent, e - config.slack))
        )
    map_exponent = anchored_exponent(trace, sampler)
    if map_exponent < min(mu, 1.0) - config.slack:
        failures.append(
            StageFailure(k, eta, "map-exponent", "fitted %.4f < %.4f" % (map_exponent, min(mu, 1.0) - config.slack))
        )

    if e < 1.0:
        holder_M = (1.0 + config.constant_slack) * anchored_constant(
            ctx.normal, eta, e, pairs=config.holder_pairs, seed=config.seed
        )
        profile = decay_profile(
            ctx.normal,
            eta,
            e,
            r_grid=geometric_grid(config.k_max),
            field=ctx.field,
            holder_M=holder_M,
        )
        decay_C = profile.empirical_C
        accurate = profile.all_accurate
        over = profile.majorant_violations()
        if over:
            failures.append(StageFailure(k, eta, "majorant", "gradient above majorant at r=%s" % over))
        small = profile.small_radius_violations()
        if small:
            failures.append(StageFailure(k, eta, "small-radius-bound", "violations at r=%s" % small))
        if np.isfinite(profile.tail_slope) and profile.tail_slope < (e - 1.0) - config.slack:
            failures.append(
                StageFailure(
                    k, eta, "decay-slope", "slope %.4f < %.4f" % (profile.tail_slope, e - 1.0 - config.slack)
                )
            )
        rows = radial_holder_from_gradient(
            profile,
            C=(1.0 + config.constant_slack) * decay_C,
            mu=e,
            s_min=config.radial_s_min,
            panel_order=config.radial_panel_order,
        )
        bad = [row.r for row in rows if not row.holds() or row.agreement() > config.radial_tol]
        if bad:
            failures.append(StageFailure(k, eta, "radial-holder", "rows at r=%s" % bad))
    else:
        result = bounded_gradient_check(ctx.normal, eta, e, r_grid=geometric_grid(config.final_k_max), field=ctx.field)
        decay_C = result.sup_gradient
        accurate = result.accurate
        if not result.monotone_tail:
            failures.append(StageFailure(k, eta, "gradient-tail", "tail ratio above limit"))

    tangential = qc_component_propagation((decay_C, e - 1.0), K)
    bound = isometry_gradient_propagation([decay_C] + [tangential[0]] * (len(eta) - 1), ctx.chart.iso)[0]
    row = EtaRow(
        k,
        tuple(eta),
        tuple(ctx.q),
        nb.M_empirical,
        nb.M_theory,
        nb.exponent,
        nb.fitted_exponent,
        map_exponent,
        decay_C,
        accurate,
    )
    return row, failures, bound


def _run_eta_stage(args):
    ctx, k, ladder, c1, trace, domain, K, config = args
    try:
        return _eta_stage(ctx, k, ladder, c1, trace, domain, K, config)
    except HRLError as e:
        return None, [StageFailure(k, ctx.eta, type(e).__name__, str(e))], None


def bootstrap_verify(ball_map, domain, eta_samples=None, config=None):
    """Runs the exponent bootstrap for a harmonic qc map onto a C^{1,alpha} domain.

    Args:
        ball_map (BallMap): the map f with its boundary trace.
        domain (DomainSpec): target domain with alpha, delta and the
            reference Lipschitz constant.
        eta_samples (array): boundary points; 16 spiral points by default.
        config (BootstrapConfig): knobs; defaults when omitted.
    Returns:
        BootstrapReport
    """
    config = config if config is not None else BootstrapConfig()
    n = ball_map.n
    if domain.n != n:
        raise ConfigurationError("Map on B^%d, domain in R^%d" % (n, domain.n))
    etas = spiral_points(n, config.eta_count) if eta_samples is None else sphere_coords(eta_samples, n=n)
    trace = ball_map.trace()
    failures = []
    flags = {}

    laplacian, harmonic = _harmonic_check(ball_map, config.laplacian_tol)
    flags["laplacian"] = laplacian
    flags["harmonic"] = harmonic
    if not harmonic:
        failures.append(StageFailure(None, None, "laplacian", "max |Laplacian f| = %.3g" % laplacian))
    deviation, consistent = ball_map.check_jacobian(default_grid(n, radii=(0.0, 0.5), directions=8))
    flags["jacobian_deviation"] = deviation
    if not consistent:
        detail = "analytic and numerical Jacobians differ by %.3g" % deviation
        failures.append(StageFailure(None, None, "jacobian", detail))

    images = trace(etas)
    covered = domain.covers(images, tol=config.coverage_tol)
    flags["coverage"] = [int(np.count_nonzero(covered)), len(etas)]
    for eta in etas[~covered]:
        failures.append(StageFailure(None, tuple(eta), "coverage", "F(eta) is not on the boundary"))

    contexts = []
    c2_exceeded = []
    for eta, q in zip(etas[covered], images[covered]):
        try:
            chart = domain.chart_at(q)
        except HRLError as e:
            failures.append(StageFailure(None, tuple(eta), type(e).__name__, str(e)))
            continue
        if domain.c2 is not None and spot_check_chart(chart, c2=domain.c2, seed=config.seed).exceeds:
            c2_exceeded.append(list(q))
        contexts.append(_EtaContext(eta, q, chart, trace))
    flags["c2_exceeded"] = c2_exceeded

    try:
        initial = initial_exponent(ball_map, domain, pairs=config.mori_pairs, seed=config.seed)
    except ConfigurationError:
        raise
    except (HRLError, ValueError) as e:
        failures.append(StageFailure(None, None, "initial-exponent", "%s: %s" % (type(e).__name__, e)))
        flags["accurate"] = False
        nan = float("nan")
        certificate = _certificate(ball_map, config)
        return BootstrapReport(
            ball_map.name, domain.name, None, None, [], [], nan, nan, certificate, flags, failures, config
        )
    beta0 = min(initial.beta, config.beta_cap)
    c1 = initial.c1 * 2.0 ** (initial.beta - beta0)
    flags["beta_capped"] = beta0 < initial.beta
    ladder = make_ladder(domain.alpha, beta0)
    flags["beta_nudges"] = ladder.nudges
    K = initial.K_map

    stages = []
    eta_rows = []
    accurate = True
    final_sup = float("nan")
    for k in range(ladder.k0 + 1):
        mu, e = ladder.mus[k], ladder.mus[k + 1]
        results = parallel_map(
            _run_eta_stage,
            [(ctx, k, ladder, c1, trace, domain, K, config) for ctx in contexts],
            threads=config.threads,
            progress=config.progress,
            desc="stage %d" % k,
        )
        rows = [row for row, _, _ in results if row is not None]
        bounds = [b for _, _, b in results if b is not None]
        for _, fails, _ in results:
            failures.extend(fails)
        eta_rows.extend(rows)
        stage_accurate = all(row.accurate for row in rows)
        accurate = accurate and stage_accurate

        holder_M = float("nan")
        if e < 1.0:
            check = global_holder_check(
                trace,
                e,
                radial_C=max(bounds) if bounds else None,
                sampler=HolderSampler(pairs=config.global_pairs, seed=config.seed),
            )
            holder_M = check.global_M
            if not check.consistent:
                failures.append(StageFailure(k, None, "global-holder", "sampled constant is not finite"))
            c1 = (1.0 + config.constant_slack) * max(check.global_M, check.boundary_M)
        else:
            final_sup = max((row.decay_C for row in rows), default=float("nan"))

        stages.append(
            StageRecord(
                k,
                mu,
                e,
                max((row.M_empirical for row in rows), default=float("nan")),
                max((row.M_theory for row in rows), default=float("nan")),
                max((row.decay_C for row in rows), default=float("nan")),
                max(bounds, default=float("nan")),
                holder_M,
                min((row.fitted_exponent for row in rows), default=float("nan")),
                min((row.map_exponent for row in rows), default=float("nan")),
                stage_accurate,
            )
        )

    certificate = _certificate(ball_map, config)
    flags["accurate"] = accurate
    chain_bound = math.sqrt(n) * K * final_sup
    # the certificate must stay below what the stages prove
    if not certificate.estimate <= chain_bound:
        detail = "certificate %.6g above sqrt(n) K sup|grad| = %.6g" % (certificate.estimate, chain_bound)
        failures.append(StageFailure(None, None, "chain-bound", detail))
    return BootstrapReport(
        ball_map.name,
        domain.name,
        ladder,
        initial,
        stages,
        eta_rows,
        final_sup,
        chain_bound,
        certificate,
        flags,
        failures,
        config,
    )
