"""Flow-box charts, wave packets and the wave-packet (Bargmann) transform.

Everything lives on periodic grids.  A packet centered at rho = (y, eta) is
built from the frequency Gaussian

    prof0(eta; eta') = exp(-1/2 |dperp(eta) (xi'-xi)|^2
                           - 1/2 |dpar(eta) (omega'-omega)|^2)

renormalized by 1/sqrt(m(eta')) so that sum_eta prof^2 d_eta = 1 for every
eta', which is what makes B* B the identity.  Two quadratures for m are
provided: a scaled Gauss-Hermite rule (used for standalone packets, exact in
the constant-metric regime) and the full-lattice trapezoid sum (used inside
the transform, so the resolution-of-identity residual measures exactly the
truncation of the phase window).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bracket_metric import MetricParams, PhasePoint, delta_par, delta_perp
from .errors import ResolutionError

TWO_PI = 2.0 * np.pi


class TorusGrid:
    """Uniform periodic grid on [0, length)^d with d = n + 1 axes.

    The last axis is the flow coordinate z; the first n axes are transverse.
    Frequencies live on the lattice (2 pi / length) * Z in numpy FFT order.
    """

    def __init__(self, n_transverse: int, points: int, length: float = TWO_PI):
        if points < 4 or points % 2:
            raise ValueError("points must be even and >= 4")
        self.n = int(n_transverse)
        self.d = self.n + 1
        self.points = int(points)
        self.length = float(length)
        self.h = self.length / self.points
        self.d_eta = TWO_PI / self.length
        self.freqs_1d = TWO_PI * np.fft.fftfreq(self.points, d=self.h)
        self.axis = self.h * np.arange(self.points)

    @property
    def shape(self):
        return (self.points,) * self.d

    def freq_grids(self):
        """Meshgrid of frequency axes in FFT order, shape d x self.shape."""
        return np.meshgrid(*([self.freqs_1d] * self.d), indexing="ij")

    def space_grids(self):
        return np.meshgrid(*([self.axis] * self.d), indexing="ij")

    def fcoef(self, u):
        """Fourier coefficients u_hat(eta') = h^d sum_y u(y) e^{-i eta' y}."""
        return self.h**self.d * np.fft.fftn(np.asarray(u, dtype=complex))

    def finv(self, c):
        """Inverse of fcoef."""
        return np.fft.ifftn(np.asarray(c, dtype=complex)) / self.h**self.d

    def inner(self, f, g):
        """L^2 inner product, conjugate-linear in the first slot."""
        return complex(np.vdot(f, g) * self.h**self.d)

    def norm(self, f):
        return float(np.sqrt(np.real(np.vdot(f, f)) * self.h**self.d))

    def wrap(self, disp):
        """Wrap displacements into [-length/2, length/2)."""
        return (np.asarray(disp, dtype=float) + 0.5 * self.length) % self.length \
            - 0.5 * self.length


def _profile0(grid: TorusGrid, eta_center, p: MetricParams, fg=None):
    """Unnormalized frequency Gaussian of the packet centered at eta_center."""
    eta_center = np.asarray(eta_center, dtype=float)
    if fg is None:
        fg = grid.freq_grids()
    en = float(np.linalg.norm(eta_center))
    dp = delta_perp(en, p)
    dl = delta_par(en, p)
    q = np.zeros(grid.shape)
    for ax in range(grid.n):
        q += (dp * (fg[ax] - eta_center[ax])) ** 2
    q += (dl * (fg[-1] - eta_center[-1])) ** 2
    return np.exp(-0.5 * q)


def m_gauss_hermite(eta_primes, p: MetricParams, d: int, nodes: int = 32):
    """m(eta') = int |prof0(eta; eta')|^2 d eta by scaled Gauss-Hermite.

    The substitution eta = eta' - t / delta(eta') makes the rule exact when
    delta is constant over the node range (closed form pi^{d/2} / prod delta).
    eta_primes has shape (..., d); the last axis is the flow frequency.
    """
    eta_primes = np.asarray(eta_primes, dtype=float)
    single = eta_primes.ndim == 1
    pts = eta_primes.reshape(-1, d)
    t, w = np.polynomial.hermite.hermgauss(nodes)
    logw = np.log(w) + t**2  # w_i e^{t_i^2}, kept in log for stability
    en = np.linalg.norm(pts, axis=1)
    dp0 = delta_perp(en, p)
    dl0 = delta_par(en, p)
    scales = np.stack([dp0] * (d - 1) + [dl0], axis=1)  # (M, d)

    grids = np.meshgrid(*([t] * d), indexing="ij")
    logww = sum(np.meshgrid(*([logw] * d), indexing="ij"))
    offs = np.stack([g.ravel() for g in grids], axis=1)  # (nodes^d, d)
    logww = logww.ravel()

    out = np.zeros(pts.shape[0])
    # chunk over nodes to bound the (M x nodes^d) temporaries
    chunk = max(1, int(2e6 // max(pts.shape[0], 1)))
    for start in range(0, offs.shape[0], chunk):
        o = offs[start : start + chunk]
        lw = logww[start : start + chunk]
        eta = pts[:, None, :] - o[None, :, :] / scales[:, None, :]
        en_i = np.linalg.norm(eta, axis=2)
        dp = delta_perp(en_i, p)
        dl = delta_par(en_i, p)
        # |prof0|^2 = exp(-(dp (xi - xi'))^2 - (dl (om - om'))^2)
        q = np.zeros_like(en_i)
        for ax in range(d - 1):
            q += (dp * (eta[..., ax] - pts[:, None, ax])) ** 2
        q += (dl * (eta[..., -1] - pts[:, None, -1])) ** 2
        out += np.exp(lw[None, :] - q).sum(axis=1)
    out /= np.prod(scales, axis=1)
    out = out.reshape(eta_primes.shape[:-1])
    return float(out) if single else out


def m_closed_form_constant(p: MetricParams, d: int) -> float:
    """Constant-metric value pi^{d/2} / (dperp^{d-1} dpar) (both deltas = delta0
    when |eta| stays below the saturation scale)."""
    return np.pi ** (d / 2.0) / (p.delta0 ** (d - 1) * p.delta0)


@dataclass
class WavePacket:
    """A packet description; samples are computed lazily on the grid."""

    center: PhasePoint
    kind: str
    params: MetricParams
    grid: TorusGrid
    _samples: np.ndarray = field(default=None, repr=False)

    @property
    def samples(self) -> np.ndarray:
        if self._samples is None:
            if self.kind == "gaussian":
                self._samples = _gaussian_samples(self.grid, self.center, self.params)
            else:
                self._samples = _exact_samples(self.grid, self.center, self.params)
        return self._samples


def _check_resolution(grid: TorusGrid, eta_norm: float, p: MetricParams):
    dp = delta_perp(eta_norm, p) if grid.n else np.inf
    dl = delta_par(eta_norm, p)
    if min(dp, dl) < 4.0 * grid.h:
        raise ResolutionError(
            f"packet width {min(dp, dl):.4g} under 4 grid cells (h = {grid.h:.4g})"
        )


def _cutoff_chi(grid: TorusGrid, center_y):
    """C-infinity bump in y' - y: 1 inside half the box radius, 0 at the edge."""
    sg = grid.space_grids()
    r2 = np.zeros(grid.shape)
    for ax in range(grid.d):
        r2 += grid.wrap(sg[ax] - center_y[ax]) ** 2
    s = np.sqrt(r2) / (0.5 * grid.length)
    t = np.clip((s - 0.5) * 2.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return np.where(t >= 1.0, 0.0, np.where(t <= 0.0, 1.0, b / (a + b)))


def _gaussian_samples(grid: TorusGrid, rho: PhasePoint, p: MetricParams):
    """Cutoff Gaussian packet, L^2-normalized numerically on the grid."""
    _check_resolution(grid, rho.eta_norm, p)
    y = np.concatenate([rho.x, [rho.z]])
    eta = rho.eta
    dp = delta_perp(rho.eta_norm, p)
    dl = delta_par(rho.eta_norm, p)
    sg = grid.space_grids()
    phase = np.zeros(grid.shape)
    q = np.zeros(grid.shape)
    for ax in range(grid.d):
        w = grid.wrap(sg[ax] - y[ax])
        phase += eta[ax] * sg[ax]
        q += (w / (dp if ax < grid.n else dl)) ** 2
    out = _cutoff_chi(grid, y) * np.exp(1j * phase - 0.5 * q)
    return out / grid.norm(out)


def _exact_samples(grid: TorusGrid, rho: PhasePoint, p: MetricParams):
    """Exact packet: inverse lattice Fourier transform of prof0 / sqrt(m).

    The constant phase e^{i eta.y} aligns the packet with the absolute-phase
    convention of the Gaussian packet (rank-one projectors are unaffected).
    """
    _check_resolution(grid, rho.eta_norm, p)
    y = np.concatenate([rho.x, [rho.z]])
    fg = grid.freq_grids()
    prof = _profile0(grid, rho.eta, p, fg)
    msqrt = np.sqrt(m_gauss_hermite(np.stack(fg, axis=-1), p, grid.d))
    shift = np.zeros(grid.shape)
    for ax in range(grid.d):
        shift += fg[ax] * y[ax]
    coef = np.exp(-1j * shift) * prof / msqrt
    phase = np.exp(1j * float(np.dot(rho.eta, y)))
    return TWO_PI ** (grid.d / 2.0) * phase * grid.finv(coef)


def make_packet(rho: PhasePoint, kind: str, p: MetricParams,
                grid: TorusGrid) -> WavePacket:
    """Build a gaussian or exact wave packet centered at rho on the grid."""
    if kind not in ("gaussian", "exact"):
        raise ValueError(f"unknown packet kind {kind!r}")
    if rho.n != grid.n:
        raise ValueError("phase point dimension does not match the grid")
    _check_resolution(grid, rho.eta_norm, p)
    return WavePacket(center=rho, kind=kind, params=p, grid=grid)


def packet_norm_sq_continuous(eta_center, p: MetricParams, d: int,
                              half_width: float = 10.0,
                              points_per_axis: int = 129) -> float:
    """Continuous ||packet||^2 = int prof0^2/m d eta' by local trapezoid.

    The integrand is concentrated within ~1/delta of the center per axis;
    half_width is measured in those units.
    """
    eta_center = np.asarray(eta_center, dtype=float)
    en = float(np.linalg.norm(eta_center))
    dp = delta_perp(en, p)
    dl = delta_par(en, p)
    axes = []
    for ax in range(d):
        scale = dp if ax < d - 1 else dl
        axes.append(eta_center[ax] + np.linspace(-half_width, half_width,
                                                 points_per_axis) / scale)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    q = np.zeros(pts.shape[:-1])
    for ax in range(d - 1):
        q += (dp * (mesh[ax] - eta_center[ax])) ** 2
    q += (dl * (mesh[-1] - eta_center[-1])) ** 2
    vals = np.exp(-q) / m_gauss_hermite(pts, p, d)
    for ax in reversed(range(d)):
        vals = np.trapezoid(vals, axes[ax], axis=ax)
    return float(vals)


_M_LATTICE_CACHE: dict = {}


class BargmannTransform:
    """Wave-packet transform on a periodic grid with a finite phase window.

    The phase grid is (all spatial grid points) x (frequency-lattice centers
    eta with |k_i| <= window_i in lattice units).  m(eta') is the trapezoid
    sum over the full DFT center lattice, so B* B - Id measures exactly the
    window truncation.
    """

    def __init__(self, grid: TorusGrid, p: MetricParams, window):
        self.grid = grid
        self.p = p
        if np.isscalar(window):
            window = (int(window),) * grid.d
        self.window = tuple(int(w) for w in window)
        if any(2 * w + 1 > grid.points for w in self.window):
            raise ResolutionError("phase window exceeds the grid's DFT lattice")
        ks = [np.arange(-w, w + 1) for w in self.window]
        mesh = np.meshgrid(*ks, indexing="ij")
        self.centers = np.stack([m.ravel() for m in mesh], axis=1) * grid.d_eta
        worst = float(np.max(np.linalg.norm(self.centers, axis=1)))
        _check_resolution(grid, worst, p)
        self._fg = grid.freq_grids()
        key = (grid.n, grid.points, grid.length, p)
        if key not in _M_LATTICE_CACHE:
            _M_LATTICE_CACHE[key] = self._m_lattice()
        self._msqrt = np.sqrt(_M_LATTICE_CACHE[key])
        self.cell = grid.h**grid.d * grid.d_eta**grid.d

    # -- m and profiles -------------------------------------------------

    def _m_lattice(self):
        """m(eta') as the trapezoid sum of prof0^2 over the full center lattice."""
        g = self.grid
        full = np.stack([f.ravel() for f in g.freq_grids()], axis=1)
        out = np.zeros(g.shape)
        chunk = 64
        fg = self._fg
        for start in range(0, full.shape[0], chunk):
            cs = full[start : start + chunk]
            en = np.linalg.norm(cs, axis=1)
            dp = delta_perp(en, self.p)
            dl = delta_par(en, self.p)
            q = np.zeros((cs.shape[0],) + g.shape)
            for ax in range(g.d):
                scale = dp if ax < g.n else dl
                diff = fg[ax][None, ...] - cs[:, ax].reshape((-1,) + (1,) * g.d)
                q += (scale.reshape((-1,) + (1,) * g.d) * diff) ** 2
            out += np.exp(-q).sum(axis=0)
        return out * g.d_eta**g.d

    def profile(self, eta_center):
        """Normalized frequency profile prof0 / sqrt(m) of the packet."""
        return _profile0(self.grid, eta_center, self.p, self._fg) / self._msqrt

    def packet_samples(self, rho: PhasePoint):
        """Grid samples of the exact packet as the transform normalizes it."""
        g = self.grid
        y = np.concatenate([rho.x, [rho.z]])
        shift = np.zeros(g.shape)
        for ax in range(g.d):
            shift += self._fg[ax] * y[ax]
        coef = np.exp(-1j * shift) * self.profile(rho.eta)
        phase = np.exp(1j * float(np.dot(rho.eta, y)))
        return TWO_PI ** (g.d / 2.0) * phase * g.finv(coef)

    # -- transforms ------------------------------------------------------

    def forward_field(self, u, centers=None):
        """B u on (selected) frequency centers; shape (M,) + grid.shape."""
        g = self.grid
        uhat = g.fcoef(u)
        centers = self.centers if centers is None else np.asarray(centers, float)
        out = np.empty((centers.shape[0],) + g.shape, dtype=complex)
        sg = g.space_grids()
        for i, eta in enumerate(centers):
            # conjugate of the packet's absolute center phase e^{i eta.y}
            ph = np.exp(-1j * sum(eta[ax] * sg[ax] for ax in range(g.d)))
            out[i] = TWO_PI ** (g.d / 2.0) * ph * g.finv(self.profile(eta) * uhat)
        return out

    def forward_at(self, u, rho_list):
        """B u at arbitrary phase points (not restricted to the lattice)."""
        g = self.grid
        uhat = g.fcoef(u)
        vals = np.empty(len(rho_list), dtype=complex)
        for i, rho in enumerate(rho_list):
            prof = _profile0(g, rho.eta, self.p, self._fg) / self._msqrt
            y = np.concatenate([rho.x, [rho.z]])
            phase = np.zeros(g.shape)
            for ax in range(g.d):
                phase += self._fg[ax] * y[ax]
            s = np.sum(prof * uhat * np.exp(1j * phase))
            vals[i] = TWO_PI ** (-g.d / 2.0) * g.d_eta**g.d * s \
                * np.exp(-1j * float(np.dot(rho.eta, y)))
        return vals

    def adjoint(self, v_field, centers=None):
        """B* of a field given on the frequency centers (default: the window)."""
        g = self.grid
        centers = self.centers if centers is None else np.asarray(centers, float)
        acc = np.zeros(g.shape, dtype=complex)
        sg = g.space_grids()
        for i, eta in enumerate(centers):
            ph = np.exp(1j * sum(eta[ax] * sg[ax] for ax in range(g.d)))
            acc += self.profile(eta) * g.fcoef(ph * v_field[i])
        scale = g.d_eta**g.d / TWO_PI**g.d * TWO_PI ** (g.d / 2.0)
        return scale * g.finv(acc)

    def op_apply(self, u, symbol=None):
        """Anti-Wick operator: B* (multiply by the symbol on phase space) B.

        symbol(Y, ETA) must accept a list of spatial meshgrids Y (d arrays)
        and a frequency center vector ETA, returning the symbol on the
        spatial grid for that center; None means the identity symbol.
        """
        g = self.grid
        uhat = g.fcoef(u)
        acc = np.zeros(g.shape, dtype=complex)
        sg = g.space_grids() if symbol is not None else None
        for eta in self.centers:
            prof = self.profile(eta)
            v = TWO_PI ** (g.d / 2.0) * g.finv(prof * uhat)
            if symbol is not None:
                v = v * symbol(sg, eta)
            acc += prof * g.fcoef(v)
        scale = g.d_eta**g.d / TWO_PI**g.d * TWO_PI ** (g.d / 2.0)
        return scale * g.finv(acc)

    def identity_symbol_sum(self):
        """sum_eta prof(eta; .)^2 d_eta^d on the lattice; equals 1 where the
        window fully covers the packet mass (diagnostic for B*B - Id)."""
        g = self.grid
        acc = np.zeros(g.shape)
        for eta in self.centers:
            acc += self.profile(eta) ** 2
        return acc * g.d_eta**g.d

    def sobolev_norm(self, u, weight=None):
        """Weighted-space norm: sqrt(sum W^2 |Bu|^2 cell / (2 pi)^d).

        weight(Y, ETA) follows the symbol convention; None means W = 1 and
        the result is the L^2 norm up to the identity defect.
        """
        g = self.grid
        uhat = g.fcoef(u)
        sg = g.space_grids() if weight is not None else None
        total = 0.0
        for eta in self.centers:
            v = TWO_PI ** (g.d / 2.0) * g.finv(self.profile(eta) * uhat)
            if weight is not None:
                v = v * weight(sg, eta)
            total += float(np.sum(np.abs(v) ** 2))
        return float(np.sqrt(total * self.cell / TWO_PI**g.d))


def bargmann_field_csv(transform: BargmannTransform, u, centers=None) -> str:
    """CSV export of B u: columns (x, z, xi, omega, re, im, abs).

    For n = 0 grids the x and xi columns are omitted.
    """
    import io

    g = transform.grid
    centers = transform.centers if centers is None else np.asarray(centers, float)
    field = transform.forward_field(u, centers)
    sg = g.space_grids()
    buf = io.StringIO()
    if g.n == 0:
        buf.write("z,omega,re,im,abs\n")
    else:
        buf.write("x,z,xi,omega,re,im,abs\n")
    for i, eta in enumerate(centers):
        flat = field[i].ravel()
        ys = [s.ravel() for s in sg]
        for j in range(flat.size):
            val = flat[j]
            row = [y[j] for y in ys] + list(eta) + [val.real, val.imag, abs(val)]
            buf.write(",".join(repr(float(c)) for c in row) + "\n")
    return buf.getvalue()


# -- charts ---------------------------------------------------------------


@dataclass
class ChartAtlas:
    """Charts over a circle grid: shifts kappa_j with quadratic partition.

    chi[j] is sampled on the global grid; offsets[j] is the integer grid
    shift realizing kappa_j.  det D kappa = 1 for shifts; the array is kept
    explicit so the recomposition formula stays the general one.
    """

    points: int
    chi: np.ndarray          # (J, points)
    offsets: np.ndarray      # (J,)
    det: np.ndarray          # (J, points)

    def __post_init__(self):
        s = np.sum(self.chi**2 * self.det, axis=0)
        if np.max(np.abs(s - 1.0)) > 1e-12:
            raise ValueError("quadratic partition of unity is violated")

    @property
    def n_charts(self):
        return self.chi.shape[0]


def single_chart_atlas(points: int) -> ChartAtlas:
    """One global chart, chi = 1, det = 1 (torus models)."""
    return ChartAtlas(points=points,
                      chi=np.ones((1, points)),
                      offsets=np.zeros(1, dtype=int),
                      det=np.ones((1, points)))


def circle_atlas(points: int, n_charts: int = 2) -> ChartAtlas:
    """Overlapping-arc cover of the circle with a quadratic partition.

    Bump profiles are normalized pointwise by sqrt(sum chi0^2) so the
    partition identity holds exactly on grid points.
    """
    if n_charts < 2:
        raise ValueError("use single_chart_atlas for one chart")
    t = np.arange(points) / points
    chi0 = np.zeros((n_charts, points))
    width = 1.0 / n_charts
    for j in range(n_charts):
        center = j * width
        d = np.abs((t - center + 0.5) % 1.0 - 0.5)
        s = d / (0.95 * width)
        with np.errstate(divide="ignore", over="ignore"):
            a = np.where(s < 1.0, np.exp(-1.0 / np.maximum(1.0 - s**2, 1e-300)), 0.0)
        chi0[j] = a
    denom = np.sqrt(np.sum(chi0**2, axis=0))
    if np.any(denom == 0.0):
        raise ValueError("charts do not cover the circle")
    chi = chi0 / denom
    offsets = (np.arange(n_charts) * points) // n_charts
    return ChartAtlas(points=points, chi=chi, offsets=offsets,
                      det=np.ones((n_charts, points)))


def chart_decompose(u, atlas: ChartAtlas):
    """I u: per-chart functions v_j(y) = chi_j(y) (u o kappa_j^{-1})(y)."""
    u = np.asarray(u)
    if u.shape != (atlas.points,):
        raise ValueError("grid function does not match the atlas grid")
    return [np.roll(atlas.chi[j] * u, -atlas.offsets[j])
            for j in range(atlas.n_charts)]


def chart_recompose(vs, atlas: ChartAtlas):
    """I* v: u(m) = sum_j chi_j(kappa_j m) v_j(kappa_j m) |det D kappa_j|."""
    if len(vs) != atlas.n_charts:
        raise ValueError("wrong number of chart functions")
    out = np.zeros(atlas.points, dtype=complex)
    for j, v in enumerate(vs):
        if np.asarray(v).shape != (atlas.points,):
            raise ValueError("grid function does not match the atlas grid")
        out += atlas.chi[j] * atlas.det[j] * np.roll(v, atlas.offsets[j])
    return out
