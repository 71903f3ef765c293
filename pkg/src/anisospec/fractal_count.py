"""Fractal Weyl heuristic: Holder graphs, symplectic box covers, straightening.

A synthetic Holder one-form is a per-axis Weierstrass series
w_i(x) = sum_k a^{-beta0 k} cos(2 pi a^k x_i + phase_ik).  The trapped-set
graph at frequency omega is {xi = omega w(x)}; covering it with boxes of
base side omega^-alpha and fiber side omega^alpha gives a count whose
growth exponent is minimized at alpha = 1/(1+beta0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bracket_metric import (MetricParams, PhasePoint, delta_par, delta_perp,
                             g_norm, jbracket, phase_point)
from .errors import ResolutionError


@dataclass(frozen=True)
class HolderForm:
    """Deterministic Weierstrass-type one-form with Holder exponent beta0.

    amplitude rescales the whole series; synth_holder normalizes it so the
    empirical Holder constant is ~1, which puts the box-count regime
    crossover where the exponent analysis expects it.
    """

    beta0: float
    seed: int
    base_freq: int = 2
    n_terms: int = 18
    n: int = 1
    amplitude: float = 1.0
    phases: tuple = ()

    def __post_init__(self):
        if not 0.0 < self.beta0 <= 1.0:
            raise ValueError("beta0 must lie in (0, 1]")
        if self.base_freq < 2:
            raise ValueError("base_freq must be >= 2")
        if not self.phases:
            rng = np.random.default_rng(self.seed)
            ph = rng.uniform(0.0, 2.0 * np.pi, size=(self.n, self.n_terms))
            object.__setattr__(self, "phases", tuple(map(tuple, ph)))

    @property
    def amplitude_bound(self) -> float:
        """Geometric-series bound amplitude * sum_k a^(-beta0 k)."""
        q = self.base_freq ** (-self.beta0)
        s = (1.0 - q**self.n_terms) / (1.0 - q) if q < 1.0 else float(self.n_terms)
        return self.amplitude * s

    @property
    def finest_scale(self) -> float:
        """Scale below which the (fractal) series stops producing detail.

        A beta0 = 1 series is Lipschitz, so every scale is resolved.
        """
        if self.beta0 >= 1.0:
            return 0.0
        return self.base_freq ** (-(self.n_terms - 1))


def synth_holder(beta0: float, seed: int, n: int = 1, base_freq: int = 2,
                 n_terms=None, normalize: bool = True) -> HolderForm:
    """Build the form; beta0 = 1 uses a short (smooth) series.

    normalize=True rescales so the empirical Holder-beta0 constant at a
    reference scale is 1 (deterministic given the seed).
    """
    if n_terms is None:
        n_terms = 3 if beta0 >= 1.0 else 18
    form = HolderForm(beta0=beta0, seed=seed, base_freq=base_freq,
                      n_terms=n_terms, n=n)
    if not normalize:
        return form
    ref_scale = 1e-3 if beta0 >= 1.0 else 3e-5
    c = holder_ratio(form, ref_scale, 512, beta0, seed=0)
    return HolderForm(beta0=beta0, seed=seed, base_freq=base_freq,
                      n_terms=n_terms, n=n, amplitude=1.0 / c,
                      phases=form.phases)


def evaluate(form: HolderForm, x):
    """w(x) for x of shape (..., n); returns the same shape."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != form.n:
        raise ValueError("point dimension does not match the form")
    out = np.zeros_like(x)
    a = float(form.base_freq)
    for i in range(form.n):
        acc = np.zeros(x.shape[:-1])
        for k in range(form.n_terms):
            acc += a ** (-form.beta0 * k) * np.cos(
                2.0 * np.pi * a**k * x[..., i] + form.phases[i][k])
        out[..., i] = form.amplitude * acc
    return out


def holder_ratio(form: HolderForm, scale: float, n_pairs: int, exponent: float,
                 seed: int = 0) -> float:
    """max |w(x') - w(x)| / |x' - x|^exponent over pairs at the given scale."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=(n_pairs, form.n))
    step = rng.normal(size=(n_pairs, form.n))
    step *= scale / np.linalg.norm(step, axis=1, keepdims=True)
    xp = x + step
    diff = np.linalg.norm(evaluate(form, xp) - evaluate(form, x), axis=1)
    return float(np.max(diff) / scale**exponent)


def box_count(form: HolderForm, omega: float, alpha: float,
              samples_per_axis: int = 16) -> int:
    """Boxes of base side omega^-alpha, fiber side omega^alpha covering the
    graph of omega * w.

    Per base cell and fiber axis, the cover needs
    ceil(max(oscillation of omega w_i, omega^alpha) / omega^alpha) boxes;
    the oscillation is estimated from a fixed interior sample.
    """
    if omega < 4.0:
        raise ValueError("omega must be >= 4")
    if not 0.5 <= alpha < 1.0:
        raise ValueError("alpha must lie in [1/2, 1)")
    cell = omega ** (-alpha)
    if form.finest_scale > 0.0 and cell < form.finest_scale:
        raise ResolutionError(
            f"cell side {cell:.3g} is below the evaluator resolution "
            f"{form.finest_scale:.3g}")
    n_cells = int(np.ceil(omega**alpha))
    side = 1.0 / n_cells
    offs = (np.arange(samples_per_axis) + 0.5) / samples_per_axis * side
    total = 0
    if form.n == 1:
        starts = np.arange(n_cells) * side
        pts = (starts[:, None] + offs[None, :]).reshape(-1, 1)
        vals = omega * evaluate(form, pts)[:, 0].reshape(n_cells,
                                                         samples_per_axis)
        rng_per_cell = vals.max(axis=1) - vals.min(axis=1)
        height = omega**alpha
        total = int(np.sum(np.ceil(np.maximum(rng_per_cell, height) / height)))
        return total
    # generic n: iterate cells (kept simple; n = 1 is the hot path)
    height = omega**alpha
    grids = np.meshgrid(*([offs] * form.n), indexing="ij")
    local = np.stack([g.ravel() for g in grids], axis=1)
    for idx in np.ndindex(*([n_cells] * form.n)):
        base = np.asarray(idx, dtype=float) * side
        vals = omega * evaluate(form, base[None, :] + local)
        count = 1
        for i in range(form.n):
            rng_i = vals[:, i].max() - vals[:, i].min()
            count *= int(np.ceil(max(rng_i, height) / height))
        total += count
    return total


def count_table(form: HolderForm, omegas, alphas):
    """N(omega, alpha) table; rows follow omegas, columns alphas."""
    return np.array([[box_count(form, om, al) for al in alphas]
                     for om in omegas], dtype=float)


def regime_slope(form: HolderForm, omegas, alpha: float) -> float:
    """OLS slope of log N vs log omega at fixed alpha."""
    omegas = np.asarray(omegas, dtype=float)
    counts = np.array([box_count(form, om, alpha) for om in omegas])
    return float(np.polyfit(np.log(omegas), np.log(counts), 1)[0])


def optimal_alpha(form: HolderForm, omega_list, alpha_grid):
    """(alpha*, exponent*): the grid alpha minimizing the fitted growth slope.

    Requires at least 6 dyadic omegas and 3 valid counts per alpha.
    """
    omega_list = np.asarray(omega_list, dtype=float)
    if omega_list.size < 6:
        raise ValueError("need at least 6 omega values")
    slopes = []
    for al in alpha_grid:
        counts, oms = [], []
        for om in omega_list:
            try:
                counts.append(box_count(form, om, al))
                oms.append(om)
            except ResolutionError:
                continue
        if len(counts) < 3:
            raise ValueError(f"degenerate fit at alpha = {al}")
        slopes.append(np.polyfit(np.log(oms), np.log(counts), 1)[0])
    slopes = np.asarray(slopes)
    i = int(np.argmin(slopes))
    return float(np.asarray(alpha_grid)[i]), float(slopes[i])


# -- straightening map -------------------------------------------------------


def straighten_phi(form: HolderForm, rho: PhasePoint) -> PhasePoint:
    """Phi(x, z, xi, omega) = (x, z, xi - omega w(x), omega)."""
    if rho.n != form.n:
        raise ValueError("phase point dimension does not match the form")
    w = evaluate(form, rho.x[None, :])[0]
    return phase_point(x=rho.x, z=rho.z, xi=rho.xi - rho.omega * w,
                       omega=rho.omega)


def straighten_phi_inverse(form: HolderForm, rho: PhasePoint) -> PhasePoint:
    if rho.n != form.n:
        raise ValueError("phase point dimension does not match the form")
    w = evaluate(form, rho.x[None, :])[0]
    return phase_point(x=rho.x, z=rho.z, xi=rho.xi + rho.omega * w,
                       omega=rho.omega)


@dataclass
class LipschitzReport:
    ratios: np.ndarray
    max_ratio: float
    violations: int
    c_frozen: float


def lipschitz_unit_scale_test(form: HolderForm, p: MetricParams,
                              n_pairs: int = 10000, seed: int = 0,
                              c_frozen: float = None,
                              omega_max: float = 1.0e6) -> LipschitzReport:
    """Sampled check of <|Phi(rho') - Phi(rho)|_g(Phi rho)> <= C <|rho'-rho|_g(rho)>.

    Pairs are drawn with base offsets at the metric scale dperp(eta) and
    frequencies up to omega_max, which is where a too-small alpha_perp is
    expected to break the bound.
    """
    rng = np.random.default_rng(seed)
    ratios = np.empty(n_pairs)
    for i in range(n_pairs):
        om = np.exp(rng.uniform(np.log(10.0), np.log(omega_max)))
        x = rng.uniform(0.0, 1.0, size=form.n)
        xi = rng.normal(size=form.n) * om * 0.1
        rho = phase_point(x=x, z=rng.uniform(0, 1), xi=xi, omega=om)
        dp = delta_perp(rho.eta_norm, p)
        dl = delta_par(rho.eta_norm, p)
        dx = rng.normal(size=form.n)
        dx *= rng.uniform(0.2, 3.0) / np.linalg.norm(dx) * dp
        dxi = rng.normal(size=form.n) * rng.uniform(0.0, 2.0) / dp
        dz = rng.normal() * dl
        dom = rng.normal() / dl
        rho_p = phase_point(x=x + dx, z=rho.z + dz, xi=xi + dxi,
                            omega=om + dom)
        num = jbracket(_g_dist_at(straighten_phi(form, rho),
                                  straighten_phi(form, rho_p), p))
        den = jbracket(_g_dist_at(rho, rho_p, p))
        ratios[i] = num / den
    max_ratio = float(np.max(ratios))
    if c_frozen is None:
        c_frozen = max_ratio
    violations = int(np.count_nonzero(ratios > c_frozen))
    return LipschitzReport(ratios=ratios, max_ratio=max_ratio,
                           violations=violations, c_frozen=c_frozen)


def _g_dist_at(rho_base: PhasePoint, rho_other: PhasePoint,
               p: MetricParams) -> float:
    return g_norm(rho_base, rho_other.coords() - rho_base.coords(), p)
