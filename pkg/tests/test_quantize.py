"""Anti-Wick operators, weighted norms, and the residual probes."""

import numpy as np
import pytest

from anisospec import frozen
from anisospec.bracket_metric import jbracket, phase_point
from anisospec.quantize import (BandSubspace, FlowModel, Symbol,
                                WeightedSpace, check_certificate,
                                composition_residual, constant_symbol,
                                egorov_residual, hw_adjoint_matrices, hw_gram,
                                hw_operator_norm, l2_operator_norm,
                                microlocality_probe, op_apply, product_symbol,
                                trace_phase_sum)
from anisospec.wavepackets import BargmannTransform, TorusGrid


def smooth_symbol(z0, om0, wz, wom, hval=0.2):
    """Periodic bump in z times a Gaussian in omega, with a certificate."""

    def fn(sg, eta):
        dz2 = 2.0 * (1.0 - np.cos(sg[0] - z0))
        return np.exp(-dz2 / (2 * wz**2) - ((eta[-1] - om0) / wom) ** 2 / 2)

    return Symbol(fn=fn, h=lambda sg, eta: hval * np.ones_like(sg[0]), n0=1.0)


@pytest.fixture(scope="module")
def setup(circle_transform):
    tr = circle_transform
    band = BandSubspace(tr.grid, 4)
    wfun = lambda sg, eta: jbracket(eta[-1]) * np.ones_like(sg[0])
    space = WeightedSpace(weight=wfun, transform=tr)
    return tr, band, space


def band_random(band, seed=0):
    return band.random_function(seed)


def test_op_identity_and_constant(setup):
    tr, band, _ = setup
    u = band_random(band, 1)
    rec = op_apply(tr, None, u)
    assert np.linalg.norm(rec - u) / np.linalg.norm(u) <= 1e-3
    rec_c = op_apply(tr, constant_symbol(2.5), u)
    assert np.linalg.norm(rec_c - 2.5 * u) / np.linalg.norm(u) <= 2.5e-3


def test_op_norm_bounded_by_sup(setup):
    tr, band, _ = setup
    a = Symbol(fn=lambda sg, eta: (0.3 + 0.2 * np.cos(sg[0]))
               * np.ones_like(sg[0]) + 0.1 * np.cos(eta[-1] / 4.0))
    nrm = l2_operator_norm(lambda u: op_apply(tr, a, u), band)
    assert nrm <= 0.6 + 1e-3


def test_op_linear_in_symbol(setup):
    tr, band, _ = setup
    a = smooth_symbol(2.0, 3.0, 2.0, 6.0)
    b = smooth_symbol(4.0, -1.0, 1.5, 8.0)
    u = band_random(band, 2)
    lhs = op_apply(tr, Symbol(fn=lambda sg, eta: a.fn(sg, eta)
                              + 2.0 * b.fn(sg, eta)), u)
    rhs = op_apply(tr, a, u) + 2.0 * op_apply(tr, b, u)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(u))


def test_op_adjoint_is_conjugate_symbol(setup):
    tr, band, _ = setup
    a = smooth_symbol(2.0, 3.0, 2.0, 6.0)
    ca = Symbol(fn=lambda sg, eta: np.conj(a.fn(sg, eta)))
    m1 = band.matrix(lambda u: op_apply(tr, a, u))
    m2 = band.matrix(lambda u: op_apply(tr, ca, u))
    assert np.max(np.abs(m1.conj().T - m2)) <= 1e-12


def test_trace_formula(setup):
    """Dense trace of Op(a) vs the phase-grid sum, within 1% for compact a."""
    tr, _, _ = setup
    a = smooth_symbol(np.pi, 0.0, 1.0, 2.0)
    wide = BandSubspace(tr.grid, 12)
    dense_trace = complex(np.trace(wide.matrix(lambda u: op_apply(tr, a, u))))
    phase_sum = trace_phase_sum(tr, a)
    assert abs(dense_trace - phase_sum) <= 0.01 * abs(phase_sum)


def test_sobolev_norm_weight_one_is_l2(setup):
    tr, band, _ = setup
    u = band_random(band, 3)
    sn = tr.sobolev_norm(u)
    assert sn == pytest.approx(tr.grid.norm(u), rel=2e-3)
    assert tr.sobolev_norm(np.zeros(tr.grid.shape)) == 0.0


def test_sobolev_norm_convenience(setup):
    from anisospec.quantize import sobolev_norm
    tr, band, space = setup
    u = band_random(band, 7)
    assert sobolev_norm(u, space) \
        == pytest.approx(tr.sobolev_norm(u, weight=space.weight))


def test_sobolev_norm_plane_wave_slope(params_half):
    """||e^{i om0 z}||_W grows like <om0>^r: log-log slope within 0.05."""
    g = TorusGrid(0, 1024)
    tr = BargmannTransform(g, params_half, window=360)
    r_ord = 1.5
    wfun = lambda sg, eta: jbracket(eta[-1]) ** r_ord * np.ones_like(sg[0])
    oms = np.array([16.0, 32.0, 64.0, 128.0, 256.0])
    vals = [tr.sobolev_norm(np.exp(1j * om * g.axis), weight=wfun)
            / g.norm(np.exp(1j * om * g.axis)) for om in oms]
    slope = np.polyfit(np.log(jbracket(oms)), np.log(vals), 1)[0]
    assert abs(slope - r_ord) <= 0.05


def test_weighted_space_temperate_frozen(setup):
    """W = <omega>^1: sampled fiber temperate bound with frozen (C, N_W)."""
    tr, _, _ = setup
    from anisospec.bracket_metric import delta_par
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(5000):
        om1, om2 = rng.uniform(-64, 64, 2)
        dist = delta_par(abs(om1), tr.p) * abs(om2 - om1)
        ratio = jbracket(om2) / jbracket(om1)
        worst = max(worst, ratio
                    / jbracket(dist) ** frozen.WSPACE_TEMPERATE_NW)
    assert worst <= frozen.WSPACE_TEMPERATE_C


def test_hw_gram_positive(setup):
    _, band, space = setup
    ev = np.linalg.eigvalsh(hw_gram(space, band))
    assert ev.min() > 0


def test_power_iteration_close_to_dense(setup):
    tr, band, space = setup
    a = smooth_symbol(2.0, 3.0, 2.0, 6.0)
    est = hw_operator_norm(lambda u: op_apply(tr, a, u), space, band)
    exact = hw_operator_norm(lambda u: op_apply(tr, a, u), space, band,
                             dense=True)
    assert est == pytest.approx(exact, rel=1e-6)


def test_symbol_certificate_sampling(setup, params_half):
    tr, _, _ = setup
    sym = smooth_symbol(2.0, 3.0, 2.0, 6.0, hval=1.5)
    rng = np.random.default_rng(6)
    pairs = []
    for _ in range(200):
        a = phase_point(z=rng.uniform(0, 2 * np.pi), omega=rng.uniform(-8, 8))
        b = phase_point(z=rng.uniform(0, 2 * np.pi), omega=rng.uniform(-8, 8))
        pairs.append((a, b))
    worst = check_certificate(sym, pairs, params_half, 2 * np.pi)
    assert worst <= 1.0


def test_composition_constant_b_hits_floor(setup):
    tr, band, space = setup
    a = smooth_symbol(2.0, 4.0, 2.0, 8.0)
    est, bound = composition_residual(a, constant_symbol(2.0), space, band,
                                      frozen.COMPOSITION_C)
    assert bound == 0.0
    assert est <= frozen.COMPOSITION_FLOOR


def test_composition_bumps_bound_and_smallness(setup):
    tr, band, space = setup
    a = smooth_symbol(2.0, 4.0, 2.0, 8.0)
    b = smooth_symbol(3.5, -2.0, 2.5, 10.0)
    est, bound = composition_residual(a, b, space, band, frozen.COMPOSITION_C)
    assert est <= bound
    na = hw_operator_norm(lambda u: op_apply(tr, a, u), space, band)
    nb = hw_operator_norm(lambda u: op_apply(tr, b, u), space, band)
    assert est * 10.0 <= na * nb


def test_composition_corollary_sweep(setup):
    """Indicator + locally constant symbol: residual decreasing in C and
    below the frozen C_N C^-N envelope."""
    tr, band, space = setup
    z0, om0, rad = np.pi, 0.0, 1.0

    def dist(sg, eta):
        dz2 = 2.0 * (1.0 - np.cos(sg[0] - z0))
        return np.sqrt(4.0 * dz2 + (eta[-1] - om0) ** 2)

    a = Symbol(fn=lambda sg, eta: (dist(sg, eta) <= rad).astype(float))
    prev = np.inf
    for c_neigh in (2.0, 4.0, 8.0):
        b = Symbol(fn=lambda sg, eta, c=c_neigh:
                   1.0 + np.maximum(dist(sg, eta) - rad - c, 0.0))

        def t_apply(u):
            return op_apply(tr, a, op_apply(tr, b, u)) \
                - op_apply(tr, product_symbol(a, b), u)

        est = hw_operator_norm(t_apply, space, band)
        assert est <= frozen.COROLLARY_CN * c_neigh ** (-frozen.COROLLARY_N)
        assert est < prev
        prev = est


def test_egorov_trivial_cases(setup):
    tr, band, space = setup
    flow = FlowModel.circle_rotation()
    a = smooth_symbol(2.0, 4.0, 2.0, 8.0)
    est0, _ = egorov_residual(a, 0.0, flow, space, band, 1.0)
    assert est0 <= 1e-10
    c = constant_symbol(3.0)
    estc, _ = egorov_residual(c, 1.0, flow, space, band, 1.0)
    assert estc <= 1e-10


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_egorov_bounded(setup, t):
    """Bump in omega on the circle rotation: residual below C_t ||h||_inf
    (translation flows make the commutator vanish to round-off)."""
    tr, band, space = setup
    flow = FlowModel.circle_rotation()
    a = Symbol(fn=lambda sg, eta: np.exp(-((eta[-1] - 4.0) / 6.0) ** 2 / 2)
               * np.ones_like(sg[0]),
               h=lambda sg, eta: 0.2 * np.ones_like(sg[0]), n0=1.0)
    est, bound = egorov_residual(a, t, flow, space, band, frozen.EGOROV_CT[t])
    assert est <= bound
    assert est <= 1e-10


def test_flow_models():
    with pytest.raises(ValueError):
        FlowModel(kind="bogus", vel=(1.0,))
    flow = FlowModel.linear_torus(0.5)
    g = TorusGrid(1, 32)
    xg, zg = g.space_grids()
    u = np.exp(1j * (xg + 2 * zg))
    t = 0.3
    moved = flow.transfer(u, g, t)
    expect = np.exp(1j * ((xg + 0.5 * t) + 2 * (zg + t)))
    assert np.max(np.abs(moved - expect)) <= 1e-10
    rho = phase_point(x=[1.0], z=2.0, xi=[3.0], omega=4.0)
    lifted = flow.lift(rho, t)
    assert lifted.z == pytest.approx(2.0 - t)
    assert lifted.x[0] == pytest.approx(1.0 - 0.5 * t)
    assert lifted.omega == rho.omega


def test_microlocality_t0_peak(circle_transform):
    tr = circle_transform
    flow = FlowModel.circle_rotation()
    rho = phase_point(z=2.0, omega=6.0)
    probes = [phase_point(z=2.0 + s, omega=6.0 + w)
              for s, w in [(1.0, 0.0), (1.5, 2.0), (2.0, 8.0), (0.0, 12.0)]]
    rep = microlocality_probe(rho, 0.0, flow, probes, tr, fit_range=(1.5, 50))
    assert abs(rep.peak_value - 1.0) <= 0.1


def test_microlocality_illposed_probe_grid(circle_transform):
    tr = circle_transform
    flow = FlowModel.circle_rotation()
    rho = phase_point(z=2.0, omega=6.0)
    near = [phase_point(z=2.0 + 0.01 * k, omega=6.0) for k in range(4)]
    with pytest.raises(ValueError):
        microlocality_probe(rho, 0.0, flow, near, tr, fit_range=(1.5, np.inf))


def test_hw_adjoint_identity_cg(setup):
    """B-dagger = Op(W^2)^{-1} B* Op(W^2) on dense band matrices, CG vs
    exact solve agreeing to 1e-6."""
    tr, band, space = setup
    b_sym = smooth_symbol(2.0, 3.0, 2.0, 6.0)
    exact, via_cg = hw_adjoint_matrices(b_sym, space, band)
    assert np.max(np.abs(exact - via_cg)) <= 1e-6
