"""Cat-map mapping torus: exact zero-sector spectrum and weighted sector bounds.

The suspension of a hyperbolic toral automorphism f with constant roof 1
carries the flow generated by A = d/dz (flow-box convention).  Functions
split into Fourier sectors: the constant-in-x sector carries the exact
point spectrum {i 2 pi k}; each nonzero frequency orbit {f^T^j nu} carries
a bare shift, which the escape weight turns into a strict contraction.
Sector certificates bound the weighted shift norm by its largest entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bracket_metric import MetricParams, delta_par, delta_perp
from .errors import CertificationError, ResolutionError
from .escape import DualSplitting, EscapeConfig, weight
from .wavepackets import m_gauss_hermite


@dataclass(frozen=True)
class MappingTorus:
    """Suspension data: hyperbolic integer matrix, constant roof, potential."""

    f: tuple = ((2, 1), (1, 1))
    roof: float = 1.0
    potential: complex = 0.0

    def __post_init__(self):
        m = np.asarray(self.f, dtype=np.int64)
        if m.shape != (2, 2):
            raise ValueError("f must be a 2x2 integer matrix")
        if int(round(np.linalg.det(m))) != 1:
            raise ValueError("f must have determinant 1")
        if abs(int(m[0, 0] + m[1, 1])) <= 2:
            raise ValueError("f must be hyperbolic (|trace| > 2)")
        if self.roof != 1.0:
            raise ValueError("only the constant roof 1 is supported")
        if self.potential != 0.0:
            raise ValueError("only zero potential is supported")
        object.__setattr__(self, "f", tuple(tuple(int(v) for v in row)
                                            for row in m))

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.f, dtype=np.int64)

    @property
    def matrix_t(self) -> np.ndarray:
        return self.matrix.T

    @property
    def lam(self) -> float:
        tr = float(self.matrix[0, 0] + self.matrix[1, 1])
        return float(np.log((abs(tr) + np.sqrt(tr**2 - 4.0)) / 2.0))

    def dual_splitting(self) -> DualSplitting:
        """Stable/unstable dual directions from the transpose eigenbasis."""
        return DualSplitting.from_matrix(self.matrix_t)


@dataclass(frozen=True)
class SpectrumEntry:
    re: float
    im: float
    sector: tuple
    multiplicity: int = 1


@dataclass
class SpectrumResult:
    """Resonances with sector labels, plus per-orbit certificates."""

    entries: list
    certificates: list = field(default_factory=list)

    def points(self) -> np.ndarray:
        return np.array([complex(e.re, e.im) for e in self.entries])

    def to_json_records(self):
        return [{"re": e.re, "im": e.im, "sector": list(e.sector)}
                for e in self.entries]


# -- zero sector -----------------------------------------------------------


def zero_sector_spectrum(k_max: int, grid_points: int = 256) -> SpectrumResult:
    """Exact zero-sector resonances {i 2 pi k, |k| <= k_max}.

    Each eigenvalue is re-verified spectrally on a z-grid: the generator
    d/dz applied to exp(i 2 pi k z) returns i 2 pi k times it, and the
    descriptor records the residual.
    """
    entries = [SpectrumEntry(re=0.0, im=2.0 * np.pi * k, sector=(0, 0))
               for k in range(-k_max, k_max + 1)]
    res = SpectrumResult(entries=entries)
    res.generator_residual = max(
        generator_residual(k, grid_points) for k in range(-k_max, k_max + 1)
    ) if k_max >= 0 else 0.0
    return res


def zero_sector_eigenfunction(k: int, z):
    return np.exp(1j * 2.0 * np.pi * k * np.asarray(z))


def generator_residual(k: int, grid_points: int = 256) -> float:
    """max |A phi_k - i 2 pi k phi_k| / max(1, 2 pi |k|), A = d/dz spectrally.

    Normalized by the eigenvalue scale so the round-off of the spectral
    derivative (proportional to |2 pi k|) is measured relative to it.
    """
    z = np.arange(grid_points) / grid_points
    u = zero_sector_eigenfunction(k, z)
    freqs = 2.0 * np.pi * np.fft.fftfreq(grid_points, d=1.0 / grid_points)
    du = np.fft.ifft(1j * freqs * np.fft.fft(u))
    resid = float(np.max(np.abs(du - 1j * 2.0 * np.pi * k * u)))
    return resid / max(1.0, 2.0 * np.pi * abs(k))


def transfer_zero_sector(u, t: float):
    """L^t on periodic z-grid functions: spectral shift u(z) -> u(z + t)."""
    u = np.asarray(u, dtype=complex)
    npts = u.size
    freqs = 2.0 * np.pi * np.fft.fftfreq(npts, d=1.0 / npts)
    return np.fft.ifft(np.fft.fft(u) * np.exp(1j * freqs * t))


# -- nonzero sectors ---------------------------------------------------------


def transfer_time1_modes(coeffs: dict, torus: MappingTorus) -> dict:
    """Time-1 transfer operator on x-Fourier coefficients {nu: c}.

    (L^1 u)(x, z) = u(f x, z) for z-independent u, so mode nu maps to f^T nu
    with unchanged coefficient; the lattice map is exact integer arithmetic.
    """
    ft = torus.matrix_t
    out = {}
    for nu, c in coeffs.items():
        nu2 = tuple(int(v) for v in (ft @ np.asarray(nu, dtype=np.int64)))
        out[nu2] = out.get(nu2, 0.0) + c
    return out


def transfer_time1_grid(u, torus: MappingTorus):
    """Time-1 transfer on an x-grid sample (grid maps to itself under f)."""
    u = np.asarray(u)
    npts = u.shape[0]
    if u.shape != (npts, npts):
        raise ValueError("expected a square x-grid sample")
    idx = np.arange(npts)
    i1, i2 = np.meshgrid(idx, idx, indexing="ij")
    f = torus.matrix
    j1 = (f[0, 0] * i1 + f[0, 1] * i2) % npts
    j2 = (f[1, 0] * i1 + f[1, 1] * i2) % npts
    return u[j1, j2]


def _xi_star_gnorm(nu, split: DualSplitting, p: MetricParams) -> float:
    """|Xi_*|_g for the covector 2 pi nu (omega = 0)."""
    xi = 2.0 * np.pi * np.asarray(nu, dtype=float)
    en = float(np.linalg.norm(xi))
    return float(delta_perp(en, p) * en)


@dataclass
class FourierOrbit:
    """A window of the frequency orbit nu_j = (f^T)^j nu.

    js are the orbit indices relative to the representative; dual
    components are taken in the splitting of f^T.
    """

    representative: tuple
    js: np.ndarray
    points: np.ndarray  # (len, 2) integer frequency lattice points
    split: DualSplitting

    def components(self):
        """(xi_u, xi_s) coefficients of 2 pi nu_j for each orbit point."""
        out = np.empty((len(self.points), 2))
        for i, nu in enumerate(self.points):
            out[i] = self.split.decompose(2.0 * np.pi * np.asarray(nu, float))
        return out


def fourier_orbit(torus: MappingTorus, nu, p: MetricParams,
                  gnorm_threshold: float = 10.0,
                  max_steps: int = 200) -> FourierOrbit:
    """Extend the orbit of nu until |Xi_*|_g exceeds the threshold both ways."""
    nu = tuple(int(v) for v in nu)
    if nu == (0, 0):
        raise ValueError("nu must be nonzero")
    split = torus.dual_splitting()
    ft = torus.matrix_t
    ft_inv = np.round(np.linalg.inv(ft)).astype(np.int64)
    fwd = [np.asarray(nu, dtype=np.int64)]
    while _xi_star_gnorm(fwd[-1], split, p) <= gnorm_threshold:
        fwd.append(ft @ fwd[-1])
        if len(fwd) > max_steps:
            raise ResolutionError("orbit window failed to reach the decay regime")
    bwd = [ft_inv @ np.asarray(nu, dtype=np.int64)]
    while _xi_star_gnorm(bwd[-1], split, p) <= gnorm_threshold:
        bwd.append(ft_inv @ bwd[-1])
        if len(bwd) > max_steps:
            raise ResolutionError("orbit window failed to reach the decay regime")
    pts = np.array(list(reversed(bwd)) + fwd, dtype=np.int64)
    js = np.arange(-len(bwd), len(fwd))
    seen = {tuple(q) for q in pts}
    if len(seen) != len(pts):
        raise ValueError("orbit points are not pairwise distinct")
    return FourierOrbit(representative=nu, js=js, points=pts, split=split)


@dataclass
class OrbitOperator:
    """Weighted shift on an orbit window: subdiagonal entries
    W(nu_{j+1}) / W(nu_j)."""

    orbit: FourierOrbit
    entries: np.ndarray

    @property
    def norm_bound(self) -> float:
        return float(np.max(self.entries))

    def matrix(self) -> np.ndarray:
        npts = self.entries.size + 1
        m = np.zeros((npts, npts))
        ii = np.arange(1, npts)
        m[ii, ii - 1] = self.entries
        return m


def orbit_sector_operator(orbit: FourierOrbit, cfg: EscapeConfig,
                          p: MetricParams, omega: float = 0.0) -> OrbitOperator:
    """Weighted time-1 shift on the orbit window."""
    comps = orbit.components()
    ws = np.array([
        weight(c[0], c[1], omega, orbit.split, cfg, p) for c in comps
    ])
    return OrbitOperator(orbit=orbit, entries=ws[1:] / ws[:-1])


def orbit_representatives(torus: MappingTorus, nu_max: int):
    """Canonical representatives of the (f^T)-orbits meeting |nu|_inf <= nu_max.

    The representative is the orbit point of minimal (|nu|_2, nu) among those
    inside the box; orbits are infinite so each is listed once.
    """
    ft = torus.matrix_t
    ft_inv = np.round(np.linalg.inv(ft)).astype(np.int64)
    seen = set()
    reps = set()
    for a in range(-nu_max, nu_max + 1):
        for b in range(-nu_max, nu_max + 1):
            if (a, b) == (0, 0) or (a, b) in seen:
                continue
            # walk the in-box orbit segment (an interval, by hyperbolicity)
            box = []
            for step_m in (ft, ft_inv):
                cur = np.array([a, b], dtype=np.int64)
                while np.max(np.abs(cur)) <= nu_max:
                    box.append(tuple(int(v) for v in cur))
                    cur = step_m @ cur
                    if len(box) > 100000:
                        raise RuntimeError("orbit walk runaway")
            box = sorted(set(box), key=lambda q: (q[0] ** 2 + q[1] ** 2, q))
            seen.update(box)
            reps.add(box[0])
    return sorted(reps, key=lambda q: (q[0] ** 2 + q[1] ** 2, q))


def full_spectrum(k_max: int, nu_max: int, cfg: EscapeConfig,
                  threshold: float, torus: MappingTorus = MappingTorus(),
                  p: MetricParams = MetricParams(),
                  strict: bool = False) -> SpectrumResult:
    """Zero-sector eigenvalues plus per-orbit no-resonance certificates.

    Each certificate asserts that the weighted time-1 shift on the orbit has
    norm bound (max entry) at most `threshold`, i.e. the sector contributes
    no eigenvalue with Re z > log(threshold) at this truncation.
    """
    res = zero_sector_spectrum(k_max)
    failing = []
    for nu in orbit_representatives(torus, nu_max) if nu_max > 0 else []:
        orbit = fourier_orbit(torus, nu, p)
        op = orbit_sector_operator(orbit, cfg, p)
        ok = op.norm_bound <= threshold
        res.certificates.append({
            "nu": tuple(int(v) for v in nu),
            "norm_bound": op.norm_bound,
            "pass": bool(ok),
        })
        if not ok:
            failing.append(res.certificates[-1])
    if strict and failing:
        raise CertificationError(
            f"{len(failing)} orbit(s) exceed the threshold {threshold}",
            failing=failing)
    return res


def weyl_count(spec: SpectrumResult, gamma_re: float, omega: float) -> int:
    """# of spectrum points with Re z > gamma_re and Im z in [omega, omega+1)."""
    pts = spec.points()
    if pts.size == 0:
        return 0
    mask = (pts.real > gamma_re) & (pts.imag >= omega) & (pts.imag < omega + 1.0)
    return int(np.count_nonzero(mask))


def weyl_density_exponent(spec: SpectrumResult, omegas, gamma_re: float = -1.0,
                          sub_windows: int = 8) -> float:
    """OLS slope of log(max unit-window count near omega) vs log omega."""
    omegas = np.asarray(omegas, dtype=float)
    maxima = []
    for om in omegas:
        counts = [weyl_count(spec, gamma_re, om + s) for s in range(sub_windows)]
        maxima.append(max(max(counts), 1))
    return float(np.polyfit(np.log(omegas), np.log(maxima), 1)[0])


# -- wave-front profile of exact eigenfunctions ------------------------------


def wavefront_value(k: int, xi_u, xi_s, omega, split: DualSplitting,
                    p: MetricParams, m_eta0: float | None = None):
    """|B phi_k| at probe covectors, in closed form (vectorized).

    phi_k = exp(i 2 pi k z) has the single frequency eta0 = (0, 0, 2 pi k),
    so the transform value is (2 pi)^{3/2} prof0_eta(eta0) / sqrt(m(eta0)):
    a Gaussian in the probe's offset from eta0 at the probe's own scales.
    """
    om0 = 2.0 * np.pi * k
    xi_u = np.asarray(xi_u, dtype=float)
    xi_s = np.asarray(xi_s, dtype=float)
    omega = np.asarray(omega, dtype=float)
    xi_vec = split.compose(xi_u, xi_s)
    xi_sq = np.sum(xi_vec**2, axis=-1)
    en = np.sqrt(xi_sq + omega**2)
    dp = delta_perp(en, p)
    dl = delta_par(en, p)
    q = dp**2 * xi_sq + dl**2 * (omega - om0) ** 2
    if m_eta0 is None:
        m_eta0 = m_gauss_hermite(np.array([0.0, 0.0, om0]), p, 3)
    out = (2.0 * np.pi) ** 1.5 * np.exp(-0.5 * q) / np.sqrt(m_eta0)
    return float(out) if np.ndim(out) == 0 else out


def eigenfunction_hw_norm(k: int, split: DualSplitting, p: MetricParams,
                          cfg: EscapeConfig, half_width: float = 8.0,
                          pts: int = 65) -> float:
    """||phi_k||_{H_W} by trapezoid quadrature of W^2 |B phi_k|^2 over the fiber.

    The base integral contributes volume 1; the integrand is localized at
    xi = 0, omega = 2 pi k within ~1/delta per axis.
    """
    om0 = 2.0 * np.pi * k
    en0 = abs(om0) if om0 != 0.0 else 1.0
    dp0 = delta_perp(en0, p)
    dl0 = delta_par(en0, p)
    xu = np.linspace(-half_width / dp0, half_width / dp0, pts)
    xs = np.linspace(-half_width / dp0, half_width / dp0, pts)
    om = om0 + np.linspace(-half_width / dl0, half_width / dl0, pts)
    m0 = float(m_gauss_hermite(np.array([0.0, 0.0, om0]), p, 3))
    mu, ms, mo = np.meshgrid(xu, xs, om, indexing="ij")
    vals = wavefront_value(k, mu, ms, mo, split, p, m_eta0=m0)
    wts = weight(mu, ms, mo, split, cfg, p)
    total = (wts * vals) ** 2
    for axis_vals, ax in ((om, 2), (xs, 1), (xu, 0)):
        total = np.trapezoid(total, axis_vals, axis=ax)
    return float(np.sqrt(total / (2.0 * np.pi) ** 3))
