"""
The experiments behind each CLI subcommand.

Every command takes an ExperimentConfig and returns a CommandResult with
named tables (header, rows), a JSON-ready summary and a pass/fail verdict.
Commands never print; writing is left to the caller.
"""

import json
import os
from collections import namedtuple

import numpy as np

from hrl_py.algorithms.bootstrap import bootstrap_verify, reference_map
from hrl_py.algorithms.chart_bounds import spot_check_chart, validate_delta
from hrl_py.algorithms.qc_analysis import default_grid, distortion, mori_check, mori_exponent
from hrl_py.algorithms.regularity import (
    HolderSampler,
    bounded_gradient_check,
    decay_profile,
    explicit_decay_constant,
    geometric_grid,
    holder_estimate,
)
from hrl_py.framework.errors import ConfigurationError
from hrl_py.framework.extension import BoundaryData, HarmonicField
from hrl_py.framework.sphere import SpherePoint, make_quadrature, sphere_coords
from hrl_py.problems.gallery import make_problem
from hrl_py.problems.oracles import oracle_harmonics
from hrl_py.representations.ball_map import compose_inverse
from hrl_py.utils.interfaces.conversion import load_atlas
from hrl_py.utils.math import ball_uniform, spiral_points
from hrl_py.utils.polynomial import Polynomial

CommandResult = namedtuple("CommandResult", ["tables", "summary", "ok", "warnings"])


def problem(config):
    """Gallery map and domain; the domain comes from the atlas file when one is set."""
    ball_map, domain = make_problem(config.map, config.n)
    if config.atlas is not None:
        atlas = load_atlas(config.atlas)
        if atlas.n != config.n:
            raise ConfigurationError("Atlas is in R^%d, config has n=%d" % (atlas.n, config.n))
        domain = atlas
    return ball_map, domain


def _oracle(config, degree, index):
    oracles = oracle_harmonics(config.n, degree)
    if not 0 <= index < len(oracles):
        raise ConfigurationError("Degree %d has %d oracles, got index %d" % (degree, len(oracles), index))
    return oracles[index]


def boundary_data(config):
    """(BoundaryData, oracle or None) for the configured selector."""
    selector = config.boundary
    kind, _, arg = selector.partition(":")
    n = config.n
    try:
        if kind == "trace":
            return make_problem(config.map, n)[0].trace(), None
        if kind == "constant":
            return BoundaryData.constant(n, float(arg or 1.0)), None
        if kind == "coordinate":
            return BoundaryData.coordinate(n, int(arg or 0)), None
        if kind == "distance-power":
            return BoundaryData.distance_power(_eta(config), config.mu), None
        if kind == "harmonic":
            degree, _, index = arg.partition(":")
            oracle = _oracle(config, int(degree), int(index or 0))
            return oracle.data, oracle
        if kind == "file":
            if not os.path.exists(arg):
                raise ConfigurationError("Boundary data file %s does not exist" % arg)
            with open(arg) as f:
                poly = Polynomial.from_terms(n, json.load(f))
            return BoundaryData(n, poly, name=os.path.basename(arg)), None
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ConfigurationError):
            raise
        raise ConfigurationError("Bad boundary selector '%s': %s" % (selector, e))
    raise ConfigurationError("Unknown boundary selector '%s'" % selector)


def _eta(config):
    if config.eta is None:
        return SpherePoint.axis(config.n, config.n - 1).coords
    return sphere_coords(config.eta, n=config.n)[0]


def _field(config, data):
    rule = None if config.quad_degree is None else make_quadrature(config.n, config.quad_degree)
    return HarmonicField(data, rule=rule)


def _points(config):
    return ball_uniform(np.random.default_rng(config.seed), config.points, config.n, r_max=0.95)


def _coords(n, prefix):
    return ["%s%d" % (prefix, j + 1) for j in range(n)]


def _accuracy_warnings(flags, what):
    bad = sum(1 for ok in flags if not ok)
    return ["%d %s below the resolution of the rule" % (bad, what)] if bad else []


def cmd_extend(config):
    """u = P[F] at `points` interior points."""
    data, oracle = boundary_data(config)
    field = _field(config, data)
    header = _coords(config.n, "x") + _coords(data.arity, "u")
    if config.oracle and oracle is not None:
        header.append("oracle")
    header.append("accurate")
    rows, flags = [], []
    worst = 0.0
    for x in _points(config):
        ev = field.evaluate(x)
        row = list(x) + list(ev.value)
        if config.oracle and oracle is not None:
            exact = float(oracle.value(x[None, :])[0])
            worst = max(worst, abs(exact - ev.value[0]))
            row.append(exact)
        row.append(ev.accurate)
        rows.append(row)
        flags.append(ev.accurate)
    summary = {"data": data.name, "points": len(rows), "all_accurate": all(flags)}
    if config.oracle and oracle is not None:
        summary["max_oracle_error"] = worst
    return CommandResult({"extend": (header, rows)}, summary, True, _accuracy_warnings(flags, "points"))


def cmd_gradient(config):
    """Jacobian of u = P[F] at `points` interior points."""
    data, oracle = boundary_data(config)
    field = _field(config, data)
    m, n = data.arity, config.n
    header = _coords(n, "x") + ["J%d%d" % (i + 1, j + 1) for i in range(m) for j in range(n)]
    if config.oracle and oracle is not None:
        header += _coords(n, "oracle")
    header.append("accurate")
    rows, flags = [], []
    worst = 0.0
    for x in _points(config):
        ev = field.evaluate_gradient(x)
        row = list(x) + list(ev.value.ravel())
        if config.oracle and oracle is not None:
            exact = oracle.gradient(x[None, :])[0]
            worst = max(worst, float(np.max(np.abs(exact - ev.value[0]))))
            row += list(exact)
        row.append(ev.accurate)
        rows.append(row)
        flags.append(ev.accurate)
    summary = {"data": data.name, "points": len(rows), "all_accurate": all(flags)}
    if config.oracle and oracle is not None:
        summary["max_oracle_error"] = worst
    return CommandResult({"gradient": (header, rows)}, summary, True, _accuracy_warnings(flags, "points"))


def cmd_decay(config):
    """Gradient decay along the radius through eta; bounded-gradient mode for mu > 1."""
    data, _ = boundary_data(config)
    if data.arity != 1:
        data = data.component(config.n - 1)
    eta = _eta(config)
    grid = geometric_grid(config.k_max, config.density)
    field = _field(config, data)
    header = ["r", "grad_norm", "normalized", "majorant"]
    if config.mu < 1.0:
        profile = decay_profile(data, eta, config.mu, r_grid=grid, field=field)
        constants = explicit_decay_constant(profile.holder_M, config.mu, config.n)
        over = profile.majorant_violations()
        small = profile.small_radius_violations()
        summary = {
            "mode": "decay",
            "data": data.name,
            "eta": list(eta),
            "mu": config.mu,
            "holder_M": profile.holder_M,
            "empirical_C": profile.empirical_C,
            "fitted_slope": profile.fitted_slope,
            "tail_slope": profile.tail_slope,
            "small_r_constant": constants.small_r,
            "large_r_constant": constants.large_r,
            "majorant_violations": over,
            "small_radius_violations": small,
            "all_accurate": profile.all_accurate,
        }
        return CommandResult(
            {"decay": (header, profile.to_rows())},
            summary,
            not over and not small,
            _accuracy_warnings(profile.accurate, "radii"),
        )
    if config.mu == 1.0:
        raise ConfigurationError("mu = 1 is neither the decay nor the bounded-gradient regime")
    result = bounded_gradient_check(data, eta, config.mu, r_grid=grid, field=field)
    rows = [[r, g, float("nan"), float("nan")] for r, g in result.samples]
    summary = {
        "mode": "bounded",
        "data": data.name,
        "eta": list(eta),
        "mu": config.mu,
        "sup_gradient": result.sup_gradient,
        "monotone_tail": result.monotone_tail,
        "all_accurate": result.accurate,
    }
    warnings = [] if result.accurate else ["some radii are below the resolution of the rule"]
    return CommandResult({"decay": (header, rows)}, summary, result.monotone_tail, warnings)


def cmd_holder(config):
    """Sampled Holder constant of the boundary data, uniform and anchored at eta."""
    data, _ = boundary_data(config)
    eta = _eta(config)
    uniform = holder_estimate(data, config.mu, HolderSampler(pairs=config.pairs, seed=config.seed))
    anchored = holder_estimate(data, config.mu, HolderSampler(pairs=config.pairs, anchor=eta, seed=config.seed))
    summary = {
        "data": data.name,
        "mu": config.mu,
        "uniform": uniform._asdict(),
        "anchored": dict(anchored._asdict(), eta=list(eta)),
    }
    rows = [["uniform", uniform.M, uniform.pair_count], ["anchored", anchored.M, anchored.pair_count]]
    return CommandResult({"holder": (["sampler", "M", "pairs"], rows)}, summary, True, [])


def cmd_distortion(config):
    ball_map, _ = problem(config)
    report = distortion(ball_map, default_grid(config.n))
    header = _coords(config.n, "x") + ["sigma_max", "sigma_min", "K"]
    summary = {"map": ball_map.name, "K_global": report.K_global, "sup_gradient": report.sup_gradient}
    return CommandResult({"distortion": (header, report.to_rows())}, summary, True, [])


def cmd_mori(config):
    """Mori exponent of g = G^{-1} o f and its sampled Holder constant."""
    ball_map, domain = problem(config)
    G = reference_map(ball_map, domain)
    g = compose_inverse(G, ball_map)
    K = distortion(g, default_grid(config.n)).K_global
    beta = mori_exponent(K, config.n)
    check = mori_check(g, beta, {"pairs": config.mori_pairs, "seed": config.seed})
    summary = {
        "map": ball_map.name,
        "reference": G.name,
        "K": K,
        "beta": beta,
        "M_empirical": check.M_empirical,
        "violations": check.violations,
        "pair_count": check.pair_count,
        "argmax_pair": [list(p) for p in check.argmax_pair],
    }
    rows = [[K, beta, check.M_empirical, check.violations, check.pair_count]]
    header = ["K", "beta", "M_empirical", "violations", "pairs"]
    return CommandResult({"mori": (header, rows)}, summary, check.violations == 0, [])


def _charts_to_check(config, ball_map, domain):
    if domain.charts:
        return domain.charts
    images = ball_map.trace()(spiral_points(config.n, config.eta_count))
    return [domain.chart_at(q) for q in images]


def cmd_charts(config):
    """Chart normalization, C2 estimates, the product inequality and the delta condition."""
    ball_map, domain = problem(config)
    header = _coords(config.n, "q") + ["radius", "c2_declared", "c2_estimate", "exceeds", "normalized", "violations"]
    rows = []
    ok = True
    warnings = []
    for chart in _charts_to_check(config, ball_map, domain):
        check = spot_check_chart(chart, c2=domain.c2, pairs=config.chart_pairs, seed=config.seed)
        declared = check.c2_declared if check.c2_declared is not None else float("nan")
        rows.append(
            list(chart.anchor)
            + [chart.radius, declared, check.c2_estimate, check.exceeds]
            + [check.normalization_ok, check.product_violations]
        )
        ok = ok and check.normalization_ok and check.product_violations == 0
        if check.exceeds:
            warnings.append("chart at %s exceeds the declared C2" % list(np.round(chart.anchor, 6)))
    summary = {"domain": domain.name, "charts": len(rows)}
    if domain.rho is not None:
        delta = validate_delta(ball_map.trace(), domain.delta, domain.rho, pairs=config.pairs, seed=config.seed)
        summary["delta"] = delta._asdict()
        ok = ok and delta.ok
    return CommandResult({"charts": (header, rows)}, summary, ok, warnings)


def cmd_bootstrap(config):
    ball_map, domain = problem(config)
    report = bootstrap_verify(ball_map, domain, config=config.bootstrap_config())
    header = [
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
    ]
    columns = ["M_empirical", "M_theory", "exponent", "fitted_exponent", "decay_C", "accurate"]
    eta_header = ["stage"] + _coords(config.n, "eta") + columns
    eta_rows = [[row.stage] + list(row.eta) + [getattr(row, c) for c in columns] for row in report.eta_rows]
    warnings = [] if report.accurate else ["some gradients were below the resolution of the rule"]
    return CommandResult(
        {"stages": (header, report.stage_rows()), "eta": (eta_header, eta_rows)},
        report.to_json(),
        report.passed,
        warnings,
    )


COMMANDS = {
    "extend": cmd_extend,
    "gradient": cmd_gradient,
    "decay": cmd_decay,
    "holder": cmd_holder,
    "distortion": cmd_distortion,
    "mori": cmd_mori,
    "charts": cmd_charts,
    "bootstrap": cmd_bootstrap,
}
