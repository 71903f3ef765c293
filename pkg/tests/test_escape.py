"""Escape functions over the cat-matrix linear model."""

import numpy as np
import pytest

from anisospec import frozen
from anisospec.bracket_metric import MetricParams, fit_power_constant
from anisospec.escape import (DualSplitting, EscapeConfig, decay_rate_fit,
                              decay_ratio, h_gamma_perp, lifted_flow,
                              lower_bound_report, order_estimate,
                              projective_average, temperate_ratio_samples,
                              theoretical_decay_rate, theoretical_lower_rate,
                              theoretical_orders, weight, weight_field_csv)
from anisospec.suspension import MappingTorus


@pytest.fixture(scope="module")
def split():
    return MappingTorus().dual_splitting()


@pytest.fixture(scope="module")
def p_metric():
    return MetricParams(1.0, 0.5, 0.0)


def test_dual_splitting_roundtrip(split):
    rng = np.random.default_rng(0)
    for _ in range(100):
        xi = rng.normal(size=2) * 100.0
        cu, cs = split.decompose(xi)
        back = split.compose(cu, cs)
        assert np.max(np.abs(back - xi)) <= 1e-12 * max(1.0, np.abs(xi).max())
    # cat matrix is symmetric: eigencovectors orthogonal, unit, positive x1
    assert abs(np.dot(split.e_u_dual, split.e_s_dual)) <= 1e-12
    assert split.e_u_dual[0] > 0 and split.e_s_dual[0] > 0
    assert split.lam == pytest.approx(np.log((3 + np.sqrt(5)) / 2))


def test_dual_splitting_rejects_elliptic():
    with pytest.raises(ValueError):
        DualSplitting.from_matrix([[0, -1], [1, 0]])


def test_escape_config_validation():
    with pytest.raises(ValueError):
        EscapeConfig(variant="bogus")
    with pytest.raises(ValueError):
        EscapeConfig(gamma=1.0)
    with pytest.raises(ValueError):
        EscapeConfig(gamma=0.3, gamma_prime=0.5)
    with pytest.raises(ValueError):
        EscapeConfig(r_u=0.0)


def test_h_gamma_examples(split, p_metric):
    cfg0 = EscapeConfig(r_u=2.0, r_s=2.0, gamma=0.5, gamma_prime=0.5, h0=1.0)
    # Xi_* = 0 -> h0
    assert h_gamma_perp(0.0, 0.0, 5.0, split, cfg0, p_metric) \
        == pytest.approx(1.0)
    # gamma = 0 -> h0 everywhere
    cfgz = EscapeConfig(r_u=2.0, r_s=2.0, gamma=0.0, h0=0.7)
    assert h_gamma_perp(3.0, -4.0, 1.0, split, cfgz, p_metric) \
        == pytest.approx(0.7)
    # hand oracle: |Xi_*|_g = sqrt(3) -> <sqrt 3> = 2 -> 2^{-1/2}
    # arrange |Xi_*|_g = dperp * |Xi_*| = sqrt(3): with xi_s = 0, omega = 0,
    # need |xi_u|^{1/2} = sqrt(3) -> xi_u = 3
    got = h_gamma_perp(3.0, 0.0, 0.0, split, cfg0, p_metric)
    assert got == pytest.approx(2.0 ** (-0.5))


def test_weight_on_trapped_set(split, p_metric):
    cfg = EscapeConfig(r_u=3.0, r_s=2.0, gamma=0.0)
    for om in (0.0, 1.0, 100.0):
        assert weight(0.0, 0.0, om, split, cfg, p_metric) == pytest.approx(1.0)


def test_weight_monotone_in_unstable(split, p_metric):
    cfg = EscapeConfig(r_u=3.0, r_s=2.0, gamma=0.0)
    vals = [weight(x, 0.0, 1.0, split, cfg, p_metric)
            for x in (10.0, 100.0, 1000.0)]
    assert vals[0] > vals[1] > vals[2]


def test_pure_stable_order_slope(split, p_metric):
    """log W / log |Xi| -> (1-gamma)(1-alpha_perp) R_s within 0.03."""
    cfg = EscapeConfig(r_u=2.0, r_s=3.0, gamma=0.0)
    alphas = 2.0 ** np.arange(4, 13)
    vals = [weight(0.0, a, 0.0, split, cfg, p_metric) for a in alphas]
    slope = np.polyfit(np.log(alphas), np.log(vals), 1)[0]
    assert abs(slope - 0.5 * 3.0) <= 0.03


def test_lifted_flow_freezes_omega(split):
    xu, xs, om = lifted_flow(2.0, 3.0, 7.0, 1.5, split)
    assert om == 7.0
    assert xu == pytest.approx(2.0 * np.exp(split.lam * 1.5))
    assert xs == pytest.approx(3.0 * np.exp(-split.lam * 1.5))


def test_decay_ratio_trapped_is_one(split, p_metric):
    cfg = EscapeConfig(r_u=2.0, r_s=2.0, gamma=0.0)
    for t in (0.5, 1.0, 3.0):
        assert decay_ratio(0.0, 0.0, 5.0, t, split, cfg, p_metric) \
            == pytest.approx(1.0)


def test_decay_rate_within_ten_percent(split):
    for gam, ap, big_r in ((0.0, 0.5, 2.0), (0.5, 0.67, 8.0)):
        p = MetricParams(1.0, ap, 0.0)
        cfg = EscapeConfig(r_u=big_r, r_s=big_r, gamma=gam)
        lam_th = theoretical_decay_rate(split, cfg, p)
        slope = decay_rate_fit(1.0e5, 0.0, 1.0, np.linspace(0, 3, 13),
                               split, cfg, p)
        assert abs(-slope - lam_th) <= 0.10 * lam_th


def test_lower_bound_rates(split, p_metric):
    cfg = EscapeConfig(r_u=2.0, r_s=2.0, gamma=0.0)
    uv, rv, nr = lower_bound_report(split, cfg, p_metric, n_samples=100,
                                    seed=3, c_frozen=frozen.DECAY_LOWER_C)
    assert uv == 0 and rv == 0 and nr > 100
    assert theoretical_lower_rate(split, cfg, p_metric) \
        == pytest.approx(split.lam * 0.5 * 4.0)


def test_order_estimates(split, p_metric):
    cfg = EscapeConfig(r_u=2.0, r_s=3.0, gamma=0.0)
    th = theoretical_orders(cfg, p_metric)
    assert abs(order_estimate((0.0, 0.0, 1.0), split, cfg, p_metric)
               - th["flow"]) <= 0.02
    assert abs(order_estimate((1.0, 0.0, 0.0), split, cfg, p_metric)
               - th["unstable"]) <= 0.03
    assert abs(order_estimate((0.0, 1.0, 0.0), split, cfg, p_metric)
               - th["stable"]) <= 0.03
    assert abs(order_estimate((1.0, 1.0, 0.0), split, cfg, p_metric)
               - th["transverse"]) <= 0.03
    with pytest.raises(ValueError):
        order_estimate((0.0, 0.0, 0.0), split, cfg, p_metric)


def test_w2_orders_and_average(split):
    p = MetricParams(1.0, 0.5, 0.25)
    cfg = EscapeConfig(r_u=1.0, r_s=1.0, variant="W2", r1=1.5, t_avg=4.0)
    th = theoretical_orders(cfg, p)
    assert th["stable"] == pytest.approx(1.5)
    assert abs(order_estimate((0.0, 1.0, 0.0), split, cfg, p)
               - 1.5) <= 0.05
    assert abs(order_estimate((1.0, 0.0, 0.0), split, cfg, p)
               - (-1.5)) <= 0.05
    # a(Xi_*) in [-1, 1] always
    rng = np.random.default_rng(1)
    for _ in range(100):
        a_val = projective_average(rng.normal(), rng.normal(), cfg, split)
        assert -1.0 <= a_val <= 1.0
    # exactly -1 / +1 on the invariant directions, -1 on a thin cone once
    # the averaging window exceeds the projective mixing time
    assert projective_average(1.0, 0.0, cfg, split) == pytest.approx(-1.0)
    assert projective_average(0.0, 1.0, cfg, split) == pytest.approx(1.0)
    cfg_short = EscapeConfig(r_u=1.0, r_s=1.0, variant="W2", r1=1.5,
                             t_avg=2.0)
    thin = np.exp(-2.0 * split.lam * cfg_short.t_avg) * 0.2
    assert projective_average(1.0, thin, cfg_short, split) \
        == pytest.approx(-1.0, abs=1e-6)


def test_temperate_property_frozen(split):
    cfg = EscapeConfig(r_u=2.0, r_s=3.0, gamma=0.5, gamma_prime=0.3)
    p = MetricParams(1.0, 0.67, 0.0)
    ratios, brackets = temperate_ratio_samples(split, cfg, p,
                                               n_samples=4000, seed=1)
    c_fit = fit_power_constant(ratios, brackets, frozen.ESCAPE_TEMPERATE_N0)
    assert c_fit <= frozen.ESCAPE_TEMPERATE_C


def test_weight_field_csv(split, p_metric):
    cfg = EscapeConfig(r_u=2.0, r_s=2.0, gamma=0.0)
    text = weight_field_csv(split, cfg, p_metric, [0.0, 1.0], [0.0], [1.0])
    lines = text.splitlines()
    assert lines[0] == "xi_u,xi_s,omega,W"
    assert len(lines) == 3
    assert float(lines[1].split(",")[3]) == pytest.approx(1.0)
