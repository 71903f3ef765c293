"""anisospec: desk-scale numerics for anisotropic-Sobolev transfer-operator
spectra.

Subpackages follow the machinery they implement: bracket_metric (Japanese
bracket and the phase-space metric), wavepackets (charts, packets, the
wave-packet transform), quantize (anti-Wick operators and residual probes),
escape (weight functions over linear hyperbolic models), shift_model (the
bi-infinite weighted shift), suspension (cat-map mapping torus), and
fractal_count (Holder graphs and symplectic box covers).
"""

__version__ = "0.1.0"

from .bracket_metric import MetricParams, PhasePoint, jbracket, phase_point
from .errors import CertificationError, ResolutionError

__all__ = [
    "MetricParams",
    "PhasePoint",
    "jbracket",
    "phase_point",
    "ResolutionError",
    "CertificationError",
    "__version__",
]
