"""Synthesizable wave-function families with known classical limits.

Each family carries closed-form descriptors sufficient to sample psi on a
grid at a given scale eps and to tabulate both of its limit measures.
Profiles are smooth and effectively compactly supported in the domain
interior; synthesis enforces resolution rules (at least 8 points per
oscillation wavelength, 8 points across concentration widths) and normalizes
to unit mass.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..grid import UniformGrid, WaveFunction, relative_boundary_amplitude

POINTS_PER_WAVELENGTH = 8
BOUNDARY_DECAY = 1e-12


class ResolutionError(ValueError):
    """Raised when a family cannot be represented on the requested grid."""


@dataclass(frozen=True)
class Profile:
    """Smooth envelope in one (possibly rescaled) variable, peak height 1.

    gaussian: exp(-t^2/2), effectively supported on |t| <~ 7.5;
    bump: exp(1 - 1/(1-t^2)) on |t| < 1, exactly compactly supported.
    """

    kind: str = "gaussian"
    width: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("gaussian", "bump"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.width <= 0:
            raise ValueError("profile width must be positive")

    def __call__(self, y):
        t = np.asarray(y, dtype=float) / self.width
        if self.kind == "gaussian":
            return np.exp(-0.5 * t**2)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
        return out

    def derivative(self, y):
        t = np.asarray(y, dtype=float) / self.width
        if self.kind == "gaussian":
            return -t / self.width * np.exp(-0.5 * t**2)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        ti = t[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti**2)) * (-2.0 * ti / (1.0 - ti**2) ** 2) / self.width
        return out

    @property
    def support_radius(self) -> float:
        """Radius beyond which the profile falls under the boundary threshold."""
        if self.kind == "bump":
            return self.width
        return self.width * math.sqrt(-2.0 * math.log(BOUNDARY_DECAY))


@dataclass(frozen=True)
class CellPhase:
    """2*pi-periodic phase theta(y) = strength * sin(harmonic * y)."""

    strength: float = 1.0
    harmonic: int = 1

    def __call__(self, y):
        return self.strength * np.sin(self.harmonic * np.asarray(y, dtype=float))

    def derivative(self, y):
        y = np.asarray(y, dtype=float)
        return self.strength * self.harmonic * np.cos(self.harmonic * y)


@dataclass(frozen=True)
class PhaseSpec:
    """Slowly varying phase with analytic derivatives, used by WKB families.

    linear:    S(x) = slope * x
    quadratic: S(x) = curvature * x^2 / 2
    cosine:    S(x) = strength * cos(wavevector * x)
    """

    kind: str = "quadratic"
    slope: float = 0.0
    curvature: float = -1.0
    strength: float = 1.0
    wavevector: float = 1.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return self.slope * x
        if self.kind == "quadratic":
            return 0.5 * self.curvature * x**2
        if self.kind == "cosine":
            return self.strength * np.cos(self.wavevector * x)
        raise ValueError(f"unknown phase kind {self.kind!r}")

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return np.full_like(x, self.slope)
        if self.kind == "quadratic":
            return self.curvature * x
        if self.kind == "cosine":
            return -self.strength * self.wavevector * np.sin(self.wavevector * x)
        raise ValueError(f"unknown phase kind {self.kind!r}")

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return np.zeros_like(x)
        if self.kind == "quadratic":
            return np.full_like(x, self.curvature)
        if self.kind == "cosine":
            return -self.strength * self.wavevector**2 * np.cos(self.wavevector * x)
        raise ValueError(f"unknown phase kind {self.kind!r}")


# ----------------------------------------------------------------------
# family variants
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ModulatedPlaneWave:
    """f(x - center) * exp(i p0 x / eps): a single slow envelope on one carrier."""

    profile: Profile = field(default_factory=Profile)
    center: float = 0.0
    momentum: float = 1.0


@dataclass(frozen=True)
class PeriodicOscillatory:
    """f(x - center) * g(x / eps) with g given by Fourier coefficients
    g(y) = sum_q coeff[q] exp(i q y), or as a unimodular phase g = exp(i theta(y))."""

    profile: Profile = field(default_factory=Profile)
    center: float = 0.0
    harmonics: dict | None = None
    phase: CellPhase | None = None

    def __post_init__(self) -> None:
        if (self.harmonics is None) == (self.phase is None):
            raise ValueError("specify exactly one of harmonics or phase")
        if self.harmonics is not None and not self.harmonics:
            raise ValueError("harmonics must be non-empty")

    def g_values(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.phase is not None:
            return np.exp(1j * self.phase(y))
        out = np.zeros(y.shape, dtype=complex)
        for q, c in self.harmonics.items():
            out += complex(c) * np.exp(1j * int(q) * y)
        return out

    def g_derivative(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.phase is not None:
            return 1j * self.phase.derivative(y) * np.exp(1j * self.phase(y))
        out = np.zeros(y.shape, dtype=complex)
        for q, c in self.harmonics.items():
            out += complex(c) * 1j * int(q) * np.exp(1j * int(q) * y)
        return out

    @property
    def max_harmonic(self) -> float:
        if self.phase is not None:
            return max(1.0, abs(self.phase.strength) * self.phase.harmonic)
        return max(1.0, max(abs(int(q)) for q in self.harmonics))


@dataclass(frozen=True)
class Concentrating:
    """eps^{-1/2} f((x - center) / eps), optionally chirped by exp(i chirp y^2 / 2)."""

    profile: Profile = field(default_factory=Profile)
    center: float = 0.0
    chirp: float = 0.0

    def scaled_profile(self, y: np.ndarray) -> np.ndarray:
        vals = self.profile(y).astype(complex)
        if self.chirp:
            vals *= np.exp(0.5j * self.chirp * np.asarray(y, dtype=float) ** 2)
        return vals


@dataclass(frozen=True)
class CoherentState:
    """eps^{-1/4} f((x - center)/sqrt(eps)) exp(i p0 x / eps): a minimal packet."""

    profile: Profile = field(default_factory=Profile)
    center: float = 0.0
    momentum: float = 0.0


@dataclass(frozen=True)
class HarmonicEigenstate:
    """Eigenstates of -(eps^2/2) d_xx + x^2/2 along eps_n (n + 1/2) -> energy."""

    energy: float = 1.0

    def __post_init__(self) -> None:
        if self.energy <= 0:
            raise ValueError("target energy must be positive")

    def eigen_index(self, eps: float) -> int:
        return max(0, int(round(self.energy / eps - 0.5)))

    def eigenvalue(self, eps: float) -> float:
        return eps * (self.eigen_index(eps) + 0.5)


@dataclass(frozen=True)
class TwoPhaseWKB:
    """a1 e^{i s1 x / eps} + (ratio a1) e^{i s2 x / eps} with 0 <= ratio < 1.

    Models the superposition of branches that appears beyond a fold; the
    leading amplitude dominates pointwise and the two carrier slopes differ.
    """

    amplitude: Profile = field(default_factory=Profile)
    center: float = 0.0
    ratio: float = 0.5
    slope1: float = 1.0
    slope2: float = -1.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.ratio < 1.0):
            raise ValueError("amplitude ratio must lie in [0, 1)")
        if self.slope1 == self.slope2:
            raise ValueError("the two carrier slopes must differ")


@dataclass(frozen=True)
class WKBSingle:
    """a0(x - center) exp(i S0(x) / eps) with slowly varying amplitude and phase."""

    amplitude: Profile = field(default_factory=Profile)
    center: float = 0.0
    phase: PhaseSpec = field(default_factory=PhaseSpec)


CaseStudyFamily = (
    ModulatedPlaneWave
    | PeriodicOscillatory
    | Concentrating
    | CoherentState
    | HarmonicEigenstate
    | TwoPhaseWKB
    | WKBSingle
)


# ----------------------------------------------------------------------
# synthesis
# ----------------------------------------------------------------------

def _hermite_functions(n: int, xi: np.ndarray) -> np.ndarray:
    """Normalized Hermite function h_n(xi) by the stable three-term recurrence."""
    h_prev = np.pi**-0.25 * np.exp(-0.5 * xi**2)
    if n == 0:
        return h_prev
    h_curr = math.sqrt(2.0) * xi * h_prev
    for k in range(1, n):
        h_next = math.sqrt(2.0 / (k + 1)) * xi * h_curr - math.sqrt(k / (k + 1)) * h_prev
        h_prev, h_curr = h_curr, h_next
    return h_curr


def min_feature_length(family: CaseStudyFamily, eps: float, grid: UniformGrid | None = None) -> float:
    """Smallest length scale of the synthesized state that the grid must resolve."""
    if isinstance(family, ModulatedPlaneWave):
        if family.momentum == 0.0:
            return family.profile.width
        return min(family.profile.width, 2.0 * math.pi * eps / abs(family.momentum))
    if isinstance(family, PeriodicOscillatory):
        return min(family.profile.width, 2.0 * math.pi * eps / family.max_harmonic)
    if isinstance(family, Concentrating):
        scales = [eps * family.profile.width]
        if family.chirp:
            # local wavenumber of the chirp in x: chirp * y / eps at the support edge
            pmax = abs(family.chirp) * family.profile.support_radius
            if pmax > 0:
                scales.append(2.0 * math.pi * eps / pmax)
        return min(scales)
    if isinstance(family, CoherentState):
        scales = [math.sqrt(eps) * family.profile.width]
        if family.momentum:
            scales.append(2.0 * math.pi * eps / abs(family.momentum))
        return min(scales)
    if isinstance(family, HarmonicEigenstate):
        return 2.0 * math.pi * eps / math.sqrt(2.0 * family.energy)
    if isinstance(family, TwoPhaseWKB):
        pmax = max(abs(family.slope1), abs(family.slope2))
        return min(family.amplitude.width, 2.0 * math.pi * eps / max(pmax, 1e-12))
    if isinstance(family, WKBSingle):
        if grid is not None:
            probe = grid.x
        else:
            r = family.amplitude.support_radius
            probe = family.center + np.linspace(-r, r, 4097)
        amp = family.amplitude(probe - family.center)
        live = amp > BOUNDARY_DECAY * max(float(amp.max()), 1e-300)
        pmax = float(np.max(np.abs(family.phase.derivative(probe[live])))) if np.any(live) else 0.0
        if pmax == 0.0:
            return family.amplitude.width
        return min(family.amplitude.width, 2.0 * math.pi * eps / pmax)
    raise TypeError(f"unknown family {type(family).__name__}")


def synthesize(family: CaseStudyFamily, eps: float, grid: UniformGrid) -> WaveFunction:
    """Sample the family's closed form on the grid, normalized to unit mass.

    Raises ResolutionError when the grid has fewer than 8 points per smallest
    feature; warns when the result has not decayed at the domain boundary.
    """
    if not (0.0 < eps <= 1.0):
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    feature = min_feature_length(family, eps, grid)
    if grid.dx > feature / POINTS_PER_WAVELENGTH:
        raise ResolutionError(
            f"{type(family).__name__} at eps={eps:.6g} needs dx <= "
            f"{feature / POINTS_PER_WAVELENGTH:.3e} ({POINTS_PER_WAVELENGTH} points per "
            f"feature of length {feature:.3e}); grid has dx = {grid.dx:.3e}"
        )

    x = grid.x
    if isinstance(family, ModulatedPlaneWave):
        vals = family.profile(x - family.center) * np.exp(1j * family.momentum * x / eps)
    elif isinstance(family, PeriodicOscillatory):
        vals = family.profile(x - family.center) * family.g_values(x / eps)
    elif isinstance(family, Concentrating):
        vals = family.scaled_profile((x - family.center) / eps) / math.sqrt(eps)
    elif isinstance(family, CoherentState):
        vals = (
            family.profile((x - family.center) / math.sqrt(eps))
            * np.exp(1j * family.momentum * x / eps)
            / eps**0.25
        )
    elif isinstance(family, HarmonicEigenstate):
        n = family.eigen_index(eps)
        vals = _hermite_functions(n, x / math.sqrt(eps)) / eps**0.25
    elif isinstance(family, TwoPhaseWKB):
        a1 = family.amplitude(x - family.center)
        vals = a1 * np.exp(1j * family.slope1 * x / eps) + family.ratio * a1 * np.exp(
            1j * family.slope2 * x / eps
        )
    elif isinstance(family, WKBSingle):
        vals = family.amplitude(x - family.center) * np.exp(1j * family.phase.value(x) / eps)
    else:
        raise TypeError(f"unknown family {type(family).__name__}")

    vals = np.asarray(vals, dtype=complex)
    norm = grid.l2_norm(vals)
    if norm == 0.0:
        raise ValueError("family synthesizes to the zero function on this grid")
    vals = vals / norm

    edge = relative_boundary_amplitude(vals)
    if edge > BOUNDARY_DECAY:
        warnings.warn(
            f"{type(family).__name__}: relative boundary amplitude {edge:.2e} exceeds "
            f"{BOUNDARY_DECAY:.0e}; periodic images may pollute the run",
            stacklevel=2,
        )
    return WaveFunction(grid, vals, eps)
