"""Anti-Wick quantization, weighted Sobolev norms and residual probes.

Operators are realized through a BargmannTransform: Op(a) = B* M_a B on the
phase grid.  Weighted operator norms are taken on an explicit band-limited
subspace (plane-wave modes well inside the phase window, where the discrete
H_W inner product is positive definite) and estimated by power iteration,
with exact singular values available as the oracle path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .bracket_metric import (MetricParams, PhasePoint, g_dist_periodic,
                             jbracket, phase_point)
from .wavepackets import TWO_PI, BargmannTransform, TorusGrid


@dataclass
class Symbol:
    """A phase-space symbol with an optional slow-variation certificate.

    fn(space_grids, eta) returns the symbol on the spatial grid for the
    frequency center eta (the convention of BargmannTransform.op_apply).
    The certificate (h, n0) asserts |a(rho') - a(rho)| <= h(rho) <dist>^n0.
    """

    fn: Callable
    h: Optional[Callable] = None
    n0: float = 0.0

    def at(self, rho: PhasePoint):
        """Pointwise value at a phase point."""
        y = np.concatenate([rho.x, [rho.z]])
        sg = [np.array([c]) for c in y]
        return complex(np.asarray(self.fn(sg, rho.eta), dtype=complex).ravel()[0])

    def h_at(self, rho: PhasePoint):
        if self.h is None:
            raise ValueError("symbol carries no slow-variation certificate")
        y = np.concatenate([rho.x, [rho.z]])
        sg = [np.array([c]) for c in y]
        return float(np.asarray(self.h(sg, rho.eta), dtype=float).ravel()[0])


def constant_symbol(c) -> Symbol:
    return Symbol(fn=lambda sg, eta: c * np.ones_like(sg[0], dtype=complex),
                  h=lambda sg, eta: np.zeros_like(sg[0], dtype=float), n0=0.0)


def product_symbol(a: Symbol, b: Symbol) -> Symbol:
    return Symbol(fn=lambda sg, eta: np.asarray(a.fn(sg, eta))
                  * np.asarray(b.fn(sg, eta)))


def check_certificate(sym: Symbol, pairs, p: MetricParams, length: float):
    """Max over sampled pairs of |a(rho')-a(rho)| / (h(rho) <dist>^n0)."""
    worst = 0.0
    for rho, rho_p in pairs:
        num = abs(sym.at(rho_p) - sym.at(rho))
        den = sym.h_at(rho) * jbracket(
            g_dist_periodic(rho, rho_p, p, length)) ** sym.n0
        if den == 0.0:
            if num > 1e-14:
                return np.inf
            continue
        worst = max(worst, num / den)
    return worst


@dataclass
class WeightedSpace:
    """Weight function plus the transform (phase grid) it is realized on."""

    weight: Callable
    transform: BargmannTransform

    def weight_sq_symbol(self) -> Symbol:
        return Symbol(fn=lambda sg, eta: np.asarray(self.weight(sg, eta)) ** 2)


@dataclass(frozen=True)
class FlowModel:
    """Translation probe flows in flow-box coordinates.

    kind "circle_rotation" lives on the z-circle (n = 0); "linear_torus"
    translates both axes of the 2-torus.  vel is the velocity of -X, so the
    transfer operator e^{-tX} pulls back by y -> y + t * vel and the lifted
    flow moves packet centers to y - t * vel with frozen frequency.
    """

    kind: str
    vel: tuple

    def __post_init__(self):
        if self.kind not in ("circle_rotation", "linear_torus"):
            raise ValueError(f"unsupported flow model {self.kind!r}")

    @classmethod
    def circle_rotation(cls):
        return cls(kind="circle_rotation", vel=(1.0,))

    @classmethod
    def linear_torus(cls, slope: float = 0.5):
        return cls(kind="linear_torus", vel=(slope, 1.0))

    def transfer(self, u, grid: TorusGrid, t: float):
        """e^{-tX} u by spectral interpolation (exact on grid functions)."""
        if len(self.vel) != grid.d:
            raise ValueError("flow dimension does not match the grid")
        c = grid.fcoef(u)
        fg = grid.freq_grids()
        phase = sum(fg[ax] * (t * self.vel[ax]) for ax in range(grid.d))
        return grid.finv(c * np.exp(1j * phase))

    def lift(self, rho: PhasePoint, t: float) -> PhasePoint:
        y = np.concatenate([rho.x, [rho.z]]) - t * np.asarray(self.vel)
        return phase_point(x=y[:-1], z=y[-1], xi=rho.xi, omega=rho.omega)

    def compose_symbol(self, sym: Symbol, t: float) -> Symbol:
        """a o (lifted flow at time t): shift the spatial arguments."""

        def fn(sg, eta):
            shifted = [sg[ax] - t * self.vel[ax] for ax in range(len(sg))]
            return sym.fn(shifted, eta)

        return Symbol(fn=fn)


# -- operator machinery ----------------------------------------------------


def op_apply(transform: BargmannTransform, sym: Optional[Symbol], u):
    return transform.op_apply(u, None if sym is None else sym.fn)


class BandSubspace:
    """Orthonormal plane-wave modes |k|_inf <= kmax (lattice units).

    Probe operators are compressed to this subspace; kmax is chosen well
    inside the transform's phase window so the compression loses only
    packet-tail mass.
    """

    def __init__(self, grid: TorusGrid, kmax: int):
        self.grid = grid
        self.kmax = int(kmax)
        ks = [np.arange(-kmax, kmax + 1)] * grid.d
        mesh = np.meshgrid(*ks, indexing="ij")
        self.modes = np.stack([m.ravel() for m in mesh], axis=1)
        self.size = self.modes.shape[0]
        sg = grid.space_grids()
        norm = grid.length ** (grid.d / 2.0)
        self._basis = np.empty((self.size,) + grid.shape, dtype=complex)
        for i, k in enumerate(self.modes):
            phase = sum(k[ax] * grid.d_eta * sg[ax] for ax in range(grid.d))
            self._basis[i] = np.exp(1j * phase) / norm

    def to_grid(self, coeffs):
        return np.tensordot(np.asarray(coeffs, dtype=complex), self._basis, axes=1)

    def from_grid(self, u):
        h = self.grid.h ** self.grid.d
        return np.array([np.vdot(self._basis[i], u) * h for i in range(self.size)])

    def matrix(self, apply_fn) -> np.ndarray:
        """Compression P T P of an operator, as a size x size matrix."""
        out = np.empty((self.size, self.size), dtype=complex)
        for j in range(self.size):
            out[:, j] = self.from_grid(apply_fn(self._basis[j]))
        return out

    def random_function(self, seed=0):
        rng = np.random.default_rng(seed)
        c = rng.normal(size=self.size) + 1j * rng.normal(size=self.size)
        return self.to_grid(c / np.linalg.norm(c))


def hw_gram(space: WeightedSpace, band: BandSubspace) -> np.ndarray:
    """Gram of the H_W inner product <u, Op(W^2) v> on the band modes."""
    tr = space.transform
    g = band.matrix(lambda u: op_apply(tr, space.weight_sq_symbol(), u))
    return 0.5 * (g + g.conj().T)


def power_largest_sv(a: np.ndarray, iters: int = 50, seed: int = 0) -> float:
    """Largest singular value of a by power iteration on a^H a."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=a.shape[1]) + 1j * rng.normal(size=a.shape[1])
    v /= np.linalg.norm(v)
    ah = a.conj().T
    for _ in range(iters):
        w = ah @ (a @ v)
        nv = np.linalg.norm(w)
        if nv == 0.0:
            return 0.0
        v = w / nv
    return float(np.sqrt(np.real(np.vdot(v, ah @ (a @ v)))))


def hw_operator_norm(apply_fn, space: WeightedSpace, band: BandSubspace,
                     iters: int = 50, seed: int = 0,
                     dense: bool = False) -> float:
    """H_W norm of the band compression of apply_fn.

    ||T||_{H_W} = ||L^H T_band L^{-H}||_2 with G = L L^H the band Gram;
    dense=True swaps the power iteration for an exact SVD (oracle path).
    """
    gram = hw_gram(space, band)
    low = np.linalg.cholesky(gram)
    tmat = band.matrix(apply_fn)
    right = scipy.linalg.solve_triangular(low, tmat.conj().T, lower=True,
                                          trans="C").conj().T
    a = low.conj().T @ right
    if dense:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    return power_largest_sv(a, iters=iters, seed=seed)


def l2_operator_norm(apply_fn, band: BandSubspace, iters: int = 50,
                     seed: int = 0, dense: bool = False) -> float:
    """L^2 norm of the band compression of apply_fn."""
    tmat = band.matrix(apply_fn)
    if dense:
        return float(np.linalg.svd(tmat, compute_uv=False)[0])
    return power_largest_sv(tmat, iters=iters, seed=seed)


def sobolev_norm(u, space: WeightedSpace) -> float:
    """||u||_{H_W} on the space's phase grid."""
    return space.transform.sobolev_norm(u, weight=space.weight)


# -- residual probes -------------------------------------------------------


def composition_residual(a: Symbol, b: Symbol, space: WeightedSpace,
                         band: BandSubspace, c_frozen: float,
                         iters: int = 50):
    """(estimate of ||Op(a)Op(b) - Op(ab)||_{H_W},  bound C ||a h_b||_inf).

    b must carry a slow-variation certificate; the sup of |a h_b| is taken
    over the realized phase grid.
    """
    if b.h is None:
        raise ValueError("b must carry a slow-variation certificate")
    tr = space.transform

    def t_apply(u):
        return op_apply(tr, a, op_apply(tr, b, u)) \
            - op_apply(tr, product_symbol(a, b), u)

    est = hw_operator_norm(t_apply, space, band, iters=iters)
    sg = tr.grid.space_grids()
    sup = 0.0
    for eta in tr.centers:
        sup = max(sup, float(np.max(np.abs(np.asarray(a.fn(sg, eta))
                                           * np.asarray(b.h(sg, eta))))))
    return est, c_frozen * sup


def egorov_residual(a: Symbol, t: float, flow: FlowModel, space: WeightedSpace,
                    band: BandSubspace, c_frozen: float, iters: int = 50):
    """(estimate of ||e^{-tX} Op(a o phi^t) - Op(a) e^{-tX}||_{H_W},
    bound C_t ||(W o phi^t / W) h||_inf)."""
    if a.h is None:
        raise ValueError("a must carry a slow-variation certificate")
    tr = space.transform
    at = flow.compose_symbol(a, t)

    def t_apply(u):
        return flow.transfer(op_apply(tr, at, u), tr.grid, t) \
            - op_apply(tr, a, flow.transfer(u, tr.grid, t))

    est = hw_operator_norm(t_apply, space, band, iters=iters)
    sg = tr.grid.space_grids()
    sgt = [sg[ax] - t * flow.vel[ax] for ax in range(tr.grid.d)]
    sup = 0.0
    for eta in tr.centers:
        w_now = np.asarray(space.weight(sg, eta), dtype=float)
        w_fwd = np.asarray(space.weight(sgt, eta), dtype=float)
        sup = max(sup, float(np.max(w_fwd / w_now
                                    * np.abs(a.h(sg, eta)))))
    return est, c_frozen * sup


@dataclass
class MicrolocalityReport:
    distances: np.ndarray
    magnitudes: np.ndarray
    fitted_exponent: float
    peak_value: float

    def off_graph_ratio(self, min_distance: float) -> float:
        mask = self.distances >= min_distance
        if not np.any(mask):
            raise ValueError("no probe beyond the requested distance")
        return float(self.peak_value / np.max(self.magnitudes[mask]))


def microlocality_probe(rho: PhasePoint, t: float, flow: FlowModel,
                        probes, transform: BargmannTransform,
                        fit_range=(1.5, np.inf)) -> MicrolocalityReport:
    """Decay of |<phi_rho', L^t phi_rho>| against the bracketed g-distance
    of rho' from the transported center phi^t(rho).

    Returns the OLS slope of log|value| vs log<dist> (sign-flipped: the
    fitted N of the <dist>^-N bound).
    """
    g = transform.grid
    moved = flow.transfer(transform.packet_samples(rho), g, t)
    center = flow.lift(rho, t)
    dists = np.empty(len(probes))
    mags = np.empty(len(probes))
    for i, rp in enumerate(probes):
        dists[i] = g_dist_periodic(rp, center, transform.p, g.length)
        mags[i] = abs(g.inner(transform.packet_samples(rp), moved))
    lo, hi = fit_range
    mask = (dists >= lo) & (dists <= hi)
    if np.count_nonzero(mask) < 3:
        raise ValueError("probe grid has too few points beyond distance 1; "
                         "the decay fit is ill-posed")
    slope = np.polyfit(np.log(jbracket(dists[mask])),
                       np.log(mags[mask] + 1e-300), 1)[0]
    peak = abs(g.inner(transform.packet_samples(center), moved))
    return MicrolocalityReport(distances=dists, magnitudes=mags,
                               fitted_exponent=float(-slope), peak_value=peak)


# -- auxiliary identities ---------------------------------------------------


def packet_norm_sq_per_center(transform: BargmannTransform) -> np.ndarray:
    """||phi_(y,eta)||^2 for each window center (independent of y)."""
    g = transform.grid
    out = np.empty(transform.centers.shape[0])
    for i, eta in enumerate(transform.centers):
        out[i] = float(np.sum(transform.profile(eta) ** 2)) * g.d_eta**g.d
    return out


def trace_phase_sum(transform: BargmannTransform, sym: Symbol) -> complex:
    """sum over the phase grid of a(rho) ||phi_rho||^2 cell / (2 pi)^d."""
    g = transform.grid
    sg = g.space_grids()
    norms = packet_norm_sq_per_center(transform)
    total = 0.0 + 0.0j
    for i, eta in enumerate(transform.centers):
        total += norms[i] * complex(np.sum(np.asarray(sym.fn(sg, eta)))) \
            * g.h**g.d
    return total * g.d_eta**g.d / TWO_PI**g.d


def cg_solve(apply_a, b, tol: float = 1e-12, max_iter: int = 500):
    """Conjugate gradients for a Hermitian positive-definite operator."""
    x = np.zeros_like(b)
    r = b - apply_a(x)
    p = r.copy()
    rs = np.real(np.vdot(r, r))
    b_norm = float(np.linalg.norm(b))
    for _ in range(max_iter):
        ap = apply_a(p)
        alpha = rs / np.real(np.vdot(p, ap))
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = np.real(np.vdot(r, r))
        if np.sqrt(rs_new) <= tol * b_norm:
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x


def hw_adjoint_matrices(b_sym: Symbol, space: WeightedSpace,
                        band: BandSubspace, cg_tol: float = 1e-13):
    """Band matrices of B-dagger two ways: exact Gram solve vs the identity
    B-dagger = Op(W^2)^{-1} B^*_{L^2} Op(W^2) with CG inversion of Op(W^2).
    """
    tr = space.transform
    gram = hw_gram(space, band)
    bmat = band.matrix(lambda u: op_apply(tr, b_sym, u))
    exact = np.linalg.solve(gram, bmat.conj().T @ gram)
    w2mat = band.matrix(lambda u: op_apply(tr, space.weight_sq_symbol(), u))
    w2mat = 0.5 * (w2mat + w2mat.conj().T)
    rhs = bmat.conj().T @ w2mat
    via_cg = np.empty_like(rhs)
    for j in range(rhs.shape[1]):
        via_cg[:, j] = cg_solve(lambda v: w2mat @ v, rhs[:, j], tol=cg_tol)
    return exact, via_cg
