"""Japanese-bracket arithmetic and the anisotropic phase-space metric.

The bracket <s> = sqrt(1+s^2) regularizes |s|; the metric on phase space
(y, eta) = ((x, z), (xi, omega)) has transverse box size dperp(eta) and
flow-direction box size dpar(eta), both shrinking like powers of |eta|.
All functions are vectorized over numpy arrays unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def jbracket(s):
    """Regularized absolute value <s> = (1 + s^2)^(1/2)."""
    s = np.asarray(s, dtype=float)
    out = np.hypot(1.0, s)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MetricParams:
    """Admissible metric parameters (delta0, alpha_perp, alpha_par).

    Chart-change equivalence of the metric forces 1/2 <= alpha_perp < 1 and
    0 <= alpha_par <= alpha_perp; delta0 > 0 caps the box size.
    """

    delta0: float = 1.0
    alpha_perp: float = 0.5
    alpha_par: float = 0.0

    def __post_init__(self):
        if not self.delta0 > 0:
            raise ValueError(f"delta0 must be positive, got {self.delta0}")
        if not 0.5 <= self.alpha_perp < 1.0:
            raise ValueError(
                f"alpha_perp must lie in [1/2, 1), got {self.alpha_perp}"
            )
        if not 0.0 <= self.alpha_par <= self.alpha_perp:
            raise ValueError(
                f"alpha_par must lie in [0, alpha_perp], got {self.alpha_par}"
            )

    def to_config(self):
        return {
            "delta0": self.delta0,
            "alpha_perp": self.alpha_perp,
            "alpha_par": self.alpha_par,
        }

    @classmethod
    def from_config(cls, cfg):
        return cls(
            delta0=float(cfg["delta0"]),
            alpha_perp=float(cfg["alpha_perp"]),
            alpha_par=float(cfg["alpha_par"]),
        )


def _delta(eta_norm, delta0, alpha):
    """min(delta0, |eta|^-alpha); the power term counts as +inf at eta = 0."""
    eta_norm = np.asarray(eta_norm, dtype=float)
    with np.errstate(divide="ignore"):
        power = np.where(eta_norm > 0.0, eta_norm ** (-alpha), np.inf)
    out = np.minimum(delta0, power)
    return float(out) if out.ndim == 0 else out


def delta_perp(eta_norm, p: MetricParams):
    """Transverse box size dperp(eta) = min(delta0, |eta|^-alpha_perp)."""
    return _delta(eta_norm, p.delta0, p.alpha_perp)


def delta_par(eta_norm, p: MetricParams):
    """Flow-direction box size dpar(eta) = min(delta0, |eta|^-alpha_par)."""
    return _delta(eta_norm, p.delta0, p.alpha_par)


def distortion_from_eta_norm(eta_norm, p: MetricParams):
    """Distortion min(delta0^(1/alpha_perp), |eta|^-1)^(1-alpha_perp)."""
    eta_norm = np.asarray(eta_norm, dtype=float)
    with np.errstate(divide="ignore"):
        inv = np.where(eta_norm > 0.0, 1.0 / eta_norm, np.inf)
    out = np.minimum(p.delta0 ** (1.0 / p.alpha_perp), inv) ** (1.0 - p.alpha_perp)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PhasePoint:
    """A phase-space point rho = ((x, z), (xi, omega)) in flow-box coordinates.

    x and xi are length-n vectors (n >= 0); z and omega are the flow
    coordinate and flow frequency.
    """

    x: np.ndarray
    z: float
    xi: np.ndarray
    omega: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if x.shape != xi.shape or x.ndim != 1:
            raise ValueError("x and xi must be 1-d vectors of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def eta(self) -> np.ndarray:
        """Full frequency vector (xi, omega)."""
        return np.concatenate([self.xi, [self.omega]])

    @property
    def eta_norm(self) -> float:
        return float(np.linalg.norm(self.eta))

    def coords(self) -> np.ndarray:
        """Flat coordinates ordered (x, z, xi, omega), length 2(n+1)."""
        return np.concatenate([self.x, [self.z], self.xi, [self.omega]])

    @classmethod
    def from_coords(cls, vec, n: int) -> "PhasePoint":
        vec = np.asarray(vec, dtype=float)
        if vec.size != 2 * (n + 1):
            raise ValueError(f"expected {2 * (n + 1)} coordinates, got {vec.size}")
        return cls(x=vec[:n], z=vec[n], xi=vec[n + 1 : 2 * n + 1], omega=vec[2 * n + 1])


def phase_point(x=(), z=0.0, xi=(), omega=0.0) -> PhasePoint:
    """Convenience constructor; empty x/xi give the n = 0 (circle) case."""
    return PhasePoint(x=np.asarray(x, dtype=float).reshape(-1), z=z,
                      xi=np.asarray(xi, dtype=float).reshape(-1), omega=omega)


def distortion(rho: PhasePoint, p: MetricParams) -> float:
    """Distortion Delta(rho); tends to 0 as |eta| grows."""
    return float(distortion_from_eta_norm(rho.eta_norm, p))


def g_norm(rho: PhasePoint, v, p: MetricParams) -> float:
    """Norm of a tangent vector v (ordered x, z, xi, omega) in the metric at rho.

    g = (dx/dperp)^2 + (dperp dxi)^2 + (dz/dpar)^2 + (dpar domega)^2.
    """
    v = np.asarray(v, dtype=float)
    n = rho.n
    if v.size != 2 * (n + 1):
        raise ValueError(f"tangent vector must have length {2 * (n + 1)}, got {v.size}")
    dp = delta_perp(rho.eta_norm, p)
    dl = delta_par(rho.eta_norm, p)
    vx, vz = v[:n], v[n]
    vxi, vom = v[n + 1 : 2 * n + 1], v[2 * n + 1]
    return float(
        np.sqrt(
            np.dot(vx, vx) / dp**2
            + dp**2 * np.dot(vxi, vxi)
            + vz**2 / dl**2
            + dl**2 * vom**2
        )
    )


def g_dist(rho0: PhasePoint, rho1: PhasePoint, p: MetricParams) -> float:
    """||rho1 - rho0|| measured in the metric at rho0 (asymmetric in general)."""
    if rho0.n != rho1.n:
        raise ValueError("phase points have different transverse dimension")
    return g_norm(rho0, rho1.coords() - rho0.coords(), p)


def g_dist_periodic(rho0: PhasePoint, rho1: PhasePoint, p: MetricParams,
                    length: float) -> float:
    """g_dist with spatial displacements wrapped to [-length/2, length/2)."""
    if rho0.n != rho1.n:
        raise ValueError("phase points have different transverse dimension")
    d = rho1.coords() - rho0.coords()
    n = rho0.n
    d[: n + 1] = (d[: n + 1] + 0.5 * length) % length - 0.5 * length
    return g_norm(rho0, d, p)


def fit_power_constant(ratios, brackets, exponent):
    """Smallest C with ratios <= C * brackets**exponent over the sample."""
    ratios = np.asarray(ratios, dtype=float)
    brackets = np.asarray(brackets, dtype=float)
    return float(np.max(ratios / brackets**exponent))


def fit_loglog_slope(x, y):
    """Ordinary least-squares slope of log(y) against log(x)."""
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    if x.size < 3:
        raise ValueError("need at least 3 points for a slope fit")
    return float(np.polyfit(x, y, 1)[0])
