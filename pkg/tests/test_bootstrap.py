import json

import numpy as np
import pytest

import hrl_py
from hrl_py.algorithms.bootstrap import operator_norms, reference_map
from hrl_py.algorithms.qc_analysis import sample_ball_pairs
from hrl_py.utils.interfaces.conversion import dumps_report
from hrl_py.utils.math import ball_uniform, sphere_uniform, spiral_points

description = "testing the exponent ladder, the bootstrap stages and the Lipschitz certificate"


def _small_config(**kwargs):
    settings = dict(
        eta_count=4,
        k_max=6,
        final_k_max=8,
        holder_pairs=525,
        mori_pairs=2000,
        global_pairs=16,
        certificate_directions=64,
    )
    settings.update(kwargs)
    return hrl_py.BootstrapConfig(**settings)


def test_ladder():
    ladder = hrl_py.make_ladder(0.5, 0.3)
    assert np.allclose(ladder.mus, [0.3, 0.45, 0.675, 1.0125])
    assert ladder.k0 == 2 and ladder.nudges == 0
    assert ladder.final > 1.0 > ladder.mus[ladder.k0]

    # 0.25 -> 0.5 -> 1.0 lands on 1, so beta is nudged once
    nudged = hrl_py.make_ladder(1.0, 0.25)
    assert nudged.nudges == 1
    assert abs(nudged.beta - 0.2475) <= 1e-15
    assert nudged.beta_raw == 0.25
    assert np.allclose(nudged.mus, [0.2475, 0.495, 0.99, 1.98])
    assert nudged.k0 == 2

    assert hrl_py.make_ladder(1.0, 0.9).k0 == 0
    assert set(ladder.to_dict()) == {"alpha", "beta", "beta_raw", "mus", "k0", "nudges"}
    for alpha, beta in ((0.0, 0.5), (1.5, 0.5), (1.0, 0.0), (1.0, 1.0)):
        with pytest.raises(ValueError):
            hrl_py.make_ladder(alpha, beta)


def test_initial_exponent():
    ball_map, domain = hrl_py.make_problem("identity", 2)
    initial = hrl_py.initial_exponent(ball_map, domain, pairs=5000)
    assert abs(initial.K_prime - 1.0) <= 1e-9
    assert abs(initial.beta - 1.0) <= 1e-9
    assert abs(initial.c1 - 1.0) <= 1e-9

    ball_map, domain = hrl_py.make_problem("zcz-0.3", 2)
    initial = hrl_py.initial_exponent(ball_map, domain, pairs=5000)
    # G^{-1} o f = diag(1, 0.7/1.3)
    assert abs(initial.K_prime - 13.0 / 7.0) <= 1e-6
    assert abs(initial.K_map - 13.0 / 7.0) <= 1e-6
    assert abs(initial.beta - 7.0 / 13.0) <= 1e-6
    assert initial.c1 > 0.0


def test_reference_map():
    ball_map, domain = hrl_py.make_problem("zcz-0.3", 2)
    assert reference_map(ball_map, domain) is domain.reference_map
    bare = hrl_py.DomainSpec(2, surface=domain.surface)
    with pytest.raises(hrl_py.ConfigurationError):
        reference_map(ball_map, bare)
    scaled = reference_map(ball_map, hrl_py.DomainSpec(2, surface=domain.surface, lipschitz_G=2.0))
    assert np.allclose(scaled(np.array([[0.5, 0.0]])), [[1.0, 0.0]])


def test_lipschitz_certificate():
    identity = hrl_py.BallMap.linear(np.eye(3))
    cert = hrl_py.lipschitz_certificate(identity, directions=64)
    assert abs(cert.sup_sampled - 1.0) <= 1e-12
    assert abs(cert.estimate - 1.001) <= 1e-12
    assert abs(np.linalg.norm(cert.direction) - 1.0) <= 1e-12

    zcz = hrl_py.make_problem("zcz-0.3", 2)[0]
    assert 1.3 <= hrl_py.lipschitz_certificate(zcz, directions=64).estimate <= 1.3 * 1.001 + 1e-12

    f = hrl_py.make_problem("perturbed-cubic", 3)[0]
    cert = hrl_py.lipschitz_certificate(f, directions=256)
    rng = np.random.default_rng(0)
    inner = operator_norms(f, ball_uniform(rng, 5000, 3, r_max=0.99))
    near = operator_norms(f, cert.radius * sphere_uniform(rng, 20000, 3))
    # the operator norm is largest near the boundary
    assert cert.sup_sampled >= np.max(inner)
    assert np.max(near) <= cert.estimate <= 1.05 * np.max(near)


def test_bootstrap_identity():
    ball_map, domain = hrl_py.make_problem("identity", 2)
    report = hrl_py.bootstrap_verify(ball_map, domain, config=_small_config())
    assert report.passed, report.failures
    assert report.accurate
    assert abs(report.lipschitz_estimate - 1.0) <= 0.02
    assert report.flags["coverage"] == [4, 4]
    assert report.flags["beta_capped"]
    assert report.ladder.beta == 0.49
    assert len(report.stages) == report.ladder.k0 + 1
    assert len(report.eta_rows) == 4 * len(report.stages)
    for stage in report.stages:
        assert abs(stage.mu_out - (1.0 + domain.alpha) * stage.mu_in) <= 1e-12
    assert report.stages[-1].mu_out > 1.0


def test_bootstrap_report():
    ball_map, domain = hrl_py.make_problem("zcz-0.3", 2)
    report = hrl_py.bootstrap_verify(ball_map, domain, config=_small_config())
    assert 1.3 <= report.lipschitz_estimate <= 1.365
    assert report.chain_bound >= report.final_sup_gradient
    body = report.to_json()
    for key in ("map", "ladder", "initial", "stages", "eta_rows", "lipschitz_estimate", "certificate", "flags"):
        assert key in body
    assert body["config"]["eta_count"] == 4
    text = dumps_report("bootstrap", body)
    assert json.loads(text)["result"]["map"] == "zcz-0.3"
    assert len(report.stage_rows()) == len(report.stages)


def _cubic_operator_norms(points, eps=0.05):
    # |I + eps Hess(x1 x2 x3)| from the closed-form Hessian
    x1, x2, x3 = points.T
    zero = np.zeros(len(points))
    hess = np.stack(
        [np.column_stack([zero, x3, x2]), np.column_stack([x3, zero, x1]), np.column_stack([x2, x1, zero])], axis=1
    )
    return np.linalg.norm(np.eye(3) + eps * hess, ord=2, axis=(-2, -1))


def _difference_quotients(ball_map, x, y):
    return np.linalg.norm(ball_map(x) - ball_map(y), axis=1) / np.linalg.norm(x - y, axis=1)


def test_bootstrap_spatial():
    ball_map, domain = hrl_py.make_problem("perturbed-cubic", 3)
    report = hrl_py.bootstrap_verify(ball_map, domain, config=_small_config(eta_count=2))
    assert report.flags["harmonic"]
    assert "chain-bound" not in [f.reason for f in report.failures]
    assert report.lipschitz_estimate <= report.chain_bound
    # the operator norm is subharmonic, so its sup sits on the sphere
    analytic = float(np.max(_cubic_operator_norms(spiral_points(3, 20000))))
    assert abs(analytic - (1.0 + 0.1 / np.sqrt(3.0))) <= 1e-4
    assert abs(report.lipschitz_estimate - analytic) <= 0.05 * analytic
    assert report.lipschitz_estimate >= (1.0 - 1e-3) * analytic

    rng = np.random.default_rng(11)
    x, y = sample_ball_pairs(3, 100000, rng)
    ratios = _difference_quotients(ball_map, x, y)
    # close pairs hugging the sphere
    edge = (1.0 - 1e-4) * sphere_uniform(rng, 20000, 3)
    step = sphere_uniform(rng, 20000, 3) * (10.0 ** rng.uniform(-6.0, -3.0, size=20000))[:, None]
    near = edge + step
    near /= np.maximum(1.0, np.linalg.norm(near, axis=1))[:, None]
    close = np.linalg.norm(near - edge, axis=1) > 0.0
    ratios = np.concatenate([ratios, _difference_quotients(ball_map, edge[close], near[close])])
    assert np.all(ratios <= report.lipschitz_estimate)


def test_initial_exponent_failure():
    # the ellipse map leaves the unit disk, so the Mori check cannot run
    ball_map = hrl_py.make_problem("zcz-0.3", 2)[0]
    domain = hrl_py.make_problem("identity", 2)[1]
    report = hrl_py.bootstrap_verify(ball_map, domain, config=_small_config())
    assert not report.passed
    reasons = [failure.reason for failure in report.failures]
    assert "initial-exponent" in reasons
    assert "coverage" in reasons
    assert report.ladder is None and report.initial is None
    assert report.stages == [] and report.eta_rows == []
    body = json.loads(dumps_report("bootstrap", report.to_json()))["result"]
    assert body["ladder"] is None
    assert not body["passed"]


def test_chain_bound_failure():
    ball_map, domain = hrl_py.make_problem("identity", 2)
    report = hrl_py.bootstrap_verify(ball_map, domain, config=_small_config(eta_count=2, certificate_margin=10.0))
    assert report.lipschitz_estimate > report.chain_bound
    assert "chain-bound" in [f.reason for f in report.failures]
    assert not report.passed


def test_isometry_invariance():
    ball_map, domain = hrl_py.make_problem("zcz-0.3", 2)
    iso = hrl_py.Isometry.random(2, np.random.default_rng(7), scale=2.0)
    config = _small_config()
    plain = hrl_py.bootstrap_verify(ball_map, domain, config=config)
    moved = hrl_py.bootstrap_verify(ball_map.compose_isometry(iso), domain.transformed(iso), config=config)
    assert abs(moved.lipschitz_estimate - plain.lipschitz_estimate) <= 0.01 * plain.lipschitz_estimate
    assert moved.flags["coverage"] == plain.flags["coverage"]
    assert abs(moved.initial.beta - plain.initial.beta) <= 1e-6


def test_dimension_mismatch():
    ball_map = hrl_py.make_problem("identity", 2)[0]
    domain = hrl_py.make_problem("identity", 3)[1]
    with pytest.raises(hrl_py.ConfigurationError):
        hrl_py.bootstrap_verify(ball_map, domain)


def run():
    test_ladder()
    test_initial_exponent()
    test_reference_map()
    test_lipschitz_certificate()
    test_bootstrap_identity()
    test_bootstrap_report()
    test_bootstrap_spatial()
    test_initial_exponent_failure()
    test_chain_bound_failure()
    test_isometry_invariance()
    test_dimension_mismatch()


if __name__ == "__main__":
    run()
