"""Phase-space objects built from wave functions.

* the Bohmian measure: one weighted particle per grid cell sitting on the
  graph of the velocity field, rho(x_k) dx at (x_k, u(x_k));
* the discrete Wigner transform on a momentum grid tied to the scale eps
  (dp = pi eps / L), real up to an asserted residue and possibly signed;
* Husimi smoothing at the minimal coherent-state scale sqrt(eps/2), the
  nonnegative surrogate used whenever a signed Wigner function must be
  compared to a limit measure in the sliced-W1 metric;
* p-moments, the pairing functional int sigma(x, rho, J) dx, and the
  sliced-W1 pseudometric between measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distances import N_DIRECTIONS, sliced_w1
from .grid import UniformGrid, WaveFunction
from .hydrodynamics import DEFAULT_RHO_FLOOR_REL, compute_densities


@dataclass(frozen=True)
class PhaseSpaceHistogram:
    """Cell-averaged values on the (x, p) product grid."""

    values: np.ndarray      # (n_x, n_p)
    x: np.ndarray
    p: np.ndarray
    dx: float
    dp: float

    @property
    def mass(self) -> float:
        return float(self.values.sum()) * self.dx * self.dp


@dataclass(frozen=True)
class PhaseSpaceMeasure:
    """Finite nonnegative measure on (x, p) as weighted particles.

    ``defect`` records mass dropped at masked nodes (Bohmian construction);
    particle mass + defect equals the generating state's mass.
    """

    x: np.ndarray
    p: np.ndarray
    weights: np.ndarray
    provenance: str = "ensemble"
    defect: float = 0.0
    histogram: PhaseSpaceHistogram | None = None
    grid: UniformGrid | None = None

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        p = np.asarray(self.p, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if not (x.shape == p.shape == w.shape):
            raise ValueError("x, p and weights must have identical shapes")
        if w.size and float(w.min()) < 0.0:
            raise ValueError("phase-space weights must be nonnegative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "weights", w)
        if self.histogram is not None:
            if abs(self.histogram.mass - self.mass) > 1e-10 * max(1.0, self.mass):
                raise ValueError(
                    f"histogram mass {self.histogram.mass:.12e} does not match "
                    f"particle mass {self.mass:.12e}"
                )

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.p])


@dataclass(frozen=True)
class WignerGridFunction:
    """Real (possibly signed) Wigner values on the (x, p) product grid."""

    grid: UniformGrid
    eps: float
    values: np.ndarray   # (n_x, n_p)
    p: np.ndarray
    dp: float

    @property
    def mass(self) -> float:
        return float(self.values.sum()) * self.grid.dx * self.dp


def bohmian_measure(psi: WaveFunction, rho_floor_rel: float = DEFAULT_RHO_FLOOR_REL) -> PhaseSpaceMeasure:
    """One particle per unmasked cell at (x_k, u(x_k)) carrying rho(x_k) dx.

    Masked cells contribute their mass to ``defect`` instead of the measure.
    """
    fields = compute_densities(psi, rho_floor_rel)
    good = ~fields.mask
    grid = psi.grid
    return PhaseSpaceMeasure(
        x=grid.x[good],
        p=fields.velocity[good],
        weights=fields.rho[good] * grid.dx,
        provenance="bohmian",
        defect=fields.mask_mass,
        grid=grid,
    )


def wigner_momentum_grid(grid: UniformGrid, eps: float) -> tuple[np.ndarray, float]:
    """Momentum rows p_m = m * pi eps / L for m = -n/2 .. n/2 - 1."""
    dp = math.pi * eps / grid.length
    m = np.arange(-grid.n // 2, grid.n // 2)
    return m * dp, dp


def wigner_transform(
    psi: WaveFunction,
    momentum_safety: float = 0.8,
    spectral_mass_tol: float = 1e-8,
    row_chunk: int = 256,
) -> WignerGridFunction:
    """Discrete Wigner transform on the eps-tied momentum grid.

    For each x_k the periodic correlation c_j = psi(x_{k+j}) conj(psi(x_{k-j}))
    realizes the half-shift eps*y/2 exactly on grid nodes; a DFT over j lands
    on the rows p_m = m * pi eps / L.  Marginals contract to rho (over p) and
    to the momentum density (over x).  The state's spectral support must stay
    within ``momentum_safety`` of the maximal resolvable momentum
    p_max = pi eps / (2 dx); otherwise the transform aliases and this raises.
    """
    grid = psi.grid
    n = grid.n
    p, dp = wigner_momentum_grid(grid, psi.eps)

    # momentum-range check: eps-scaled spectral mass beyond safety * p_max
    coeffs = grid.dft(psi.values)
    momenta = psi.eps * grid.wavenumbers
    total = float(np.sum(np.abs(coeffs) ** 2))
    p_max = math.pi * psi.eps / (2.0 * grid.dx)
    outside = float(np.sum(np.abs(coeffs[np.abs(momenta) > momentum_safety * p_max]) ** 2))
    if total > 0 and outside / total > spectral_mass_tol:
        raise ValueError(
            f"spectral mass fraction {outside / total:.3e} lies beyond "
            f"{momentum_safety:.2f} * p_max = {momentum_safety * p_max:.4g}; "
            "refine the grid or reduce the state's momentum content"
        )

    values = np.empty((n, n), dtype=float)
    scale = grid.dx / (math.pi * psi.eps)
    j = np.arange(n)
    worst_imag = 0.0
    for lo in range(0, n, row_chunk):
        hi = min(lo + row_chunk, n)
        k = np.arange(lo, hi)[:, None]
        corr = psi.values[(k + j) % n] * np.conj(psi.values[(k - j) % n])
        rows = np.fft.fft(corr, axis=1) * scale
        worst_imag = max(worst_imag, float(np.max(np.abs(rows.imag))))
        values[lo:hi] = np.fft.fftshift(rows.real, axes=1)

    peak = float(np.max(np.abs(values))) or 1.0
    if worst_imag > 1e-10 * peak:
        raise AssertionError(
            f"Wigner imaginary residue {worst_imag:.3e} exceeds 1e-10 relative"
        )
    return WignerGridFunction(grid=grid, eps=psi.eps, values=values, p=p, dp=dp)


def husimi(
    w: WignerGridFunction,
    clip_tol: float = 1e-8,
    prune_mass: float = 1e-11,
) -> PhaseSpaceMeasure:
    """Gaussian smoothing of a Wigner grid at widths sqrt(eps/2) per axis.

    The result is clipped at zero (clipped mass asserted below ``clip_tol``
    relative, larger values indicate aliasing) and converted to a particle
    list from the histogram cells, dropping a tail of relative mass below
    ``prune_mass``.
    """
    sigma = math.sqrt(w.eps / 2.0)
    # x axis is periodic: circular convolution via the grid's Fourier multiplier
    spec = np.fft.rfft(w.values, axis=0)
    xi = 2.0 * np.pi * np.fft.rfftfreq(w.grid.n, d=w.grid.dx)
    spec *= np.exp(-0.5 * sigma**2 * xi**2)[:, None]
    smooth = np.fft.irfft(spec, n=w.grid.n, axis=0)
    # p axis lives on a line: zero-pad to a power of two, convolve, crop
    n_p = w.p.size
    pad = int(math.ceil(8.0 * sigma / w.dp)) + 1
    n_pad = 1 << (n_p + 2 * pad - 1).bit_length()
    padded = np.zeros((w.grid.n, n_pad))
    padded[:, pad : pad + n_p] = smooth
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n_pad, d=w.dp)
    spec = np.fft.rfft(padded, axis=1)
    spec *= np.exp(-0.5 * sigma**2 * freqs**2)[None, :]
    padded = np.fft.irfft(spec, n=n_pad, axis=1)

    cell = w.grid.dx * w.dp
    mass_in = w.mass
    leaked = (float(padded[:, :pad].sum()) + float(padded[:, pad + n_p :].sum())) * cell
    smooth = padded[:, pad : pad + n_p]
    mass_smooth = float(smooth.sum()) * cell
    if abs(mass_smooth - mass_in) > 1e-8 * max(1.0, abs(mass_in)) or abs(leaked) > 1e-8 * max(
        1.0, abs(mass_in)
    ):
        raise ValueError(
            f"smoothing lost mass ({mass_in:.12e} -> {mass_smooth:.12e}, "
            f"leak {leaked:.3e}); momentum content too close to the grid edge"
        )

    clipped = -float(smooth[smooth < 0].sum()) * cell
    if clipped > clip_tol * max(1.0, abs(mass_in)):
        raise ValueError(
            f"clipped negative mass {clipped:.3e} exceeds {clip_tol:.1e}; "
            "the Wigner grid is under-resolved (aliasing)"
        )
    smooth = np.maximum(smooth, 0.0)

    weights = smooth.ravel() * cell
    # cheap pre-filter before the exact mass-ranked pruning
    coarse = np.flatnonzero(weights > 1e-16 * float(weights.max()))
    order = coarse[np.argsort(weights[coarse])[::-1]]
    csum = np.cumsum(weights[order])
    total = float(weights.sum())
    keep_n = int(np.searchsorted(csum, total - prune_mass * abs(total))) + 1
    keep = order[: min(keep_n, order.size)]

    xs = np.repeat(w.grid.x, w.p.size)[keep]
    ps = np.tile(w.p, w.grid.x.size)[keep]
    hist = PhaseSpaceHistogram(values=smooth, x=w.grid.x, p=w.p, dx=w.grid.dx, dp=w.dp)
    return PhaseSpaceMeasure(
        x=xs,
        p=ps,
        weights=weights[keep],
        provenance="husimi",
        histogram=hist,
        grid=w.grid,
    )


@dataclass(frozen=True)
class Moments:
    mass: float
    density: np.ndarray        # zeroth p-moment as an x-field
    current: np.ndarray        # first p-moment as an x-field
    second_moment: float       # int |p|^2 / 2 d mu


def moments(obj: PhaseSpaceMeasure | WignerGridFunction, grid: UniformGrid | None = None) -> Moments:
    """Zeroth and first p-moments as x-fields plus the scalar second moment."""
    if isinstance(obj, WignerGridFunction):
        dens = obj.values.sum(axis=1) * obj.dp
        curr = (obj.values * obj.p).sum(axis=1) * obj.dp
        second = 0.5 * float((obj.values * obj.p**2).sum()) * obj.grid.dx * obj.dp
        return Moments(mass=obj.mass, density=dens, current=curr, second_moment=second)

    g = grid or obj.grid
    if g is None:
        raise ValueError("binning the marginals of a particle measure needs a grid")
    idx = np.clip(np.round((obj.x - g.x_min) / g.dx).astype(int), 0, g.n - 1)
    dens = np.bincount(idx, weights=obj.weights, minlength=g.n) / g.dx
    curr = np.bincount(idx, weights=obj.weights * obj.p, minlength=g.n) / g.dx
    second = 0.5 * float(np.sum(obj.weights * obj.p**2))
    return Moments(mass=obj.mass, density=dens, current=curr, second_moment=second)


def measure_distance(
    mu: PhaseSpaceMeasure,
    nu: PhaseSpaceMeasure,
    n_directions: int = N_DIRECTIONS,
) -> float:
    """Sliced-W1 between two phase-space measures (see ``distances``)."""
    return sliced_w1(mu.points(), mu.weights, nu.points(), nu.weights, n_directions)


# ----------------------------------------------------------------------
# pairing functional: int sigma(x, rho(x), J(x)) dx
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Smooth bounded test profile in one variable."""

    kind: str = "gaussian"    # gaussian | bump | uniform
    center: float = 0.0
    width: float = 1.0

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        t = (z - self.center) / self.width
        if self.kind == "gaussian":
            return np.exp(-0.5 * t**2)
        if self.kind == "bump":
            out = np.zeros_like(t)
            inside = np.abs(t) < 1.0
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
            return out
        if self.kind == "uniform":
            return np.ones_like(t)
        raise ValueError(f"unknown window kind {self.kind!r}")

    def integral(self, grid: UniformGrid) -> float:
        return float(np.real(grid.integrate(self(grid.x))))


PAIR_KINDS = ("window", "mass", "mass_squared", "current", "mono")


@dataclass(frozen=True)
class PairFunction:
    """A test function sigma(x, r, xi) from the built-in dictionary.

    window:        sigma = win(x)
    mass:          sigma = win(x) * r
    mass_squared:  sigma = win(x) * r^2
    current:       sigma = win(x) * xi
    mono:          sigma = win(x) * r * chi(xi / r)   (the graph pairing)
    """

    window: Window
    kind: str = "mass"
    chi: Window | None = None

    def __post_init__(self) -> None:
        if self.kind not in PAIR_KINDS:
            raise ValueError(f"sigma kind {self.kind!r} outside dictionary {PAIR_KINDS}")
        if self.kind == "mono" and self.chi is None:
            raise ValueError("mono pairing requires a momentum test window chi")


def pair_functional(
    psi: WaveFunction,
    sigma: PairFunction,
    rho_floor_rel: float = DEFAULT_RHO_FLOOR_REL,
) -> float:
    """Quadrature of sigma(x, rho(x), J(x)) over the grid.

    For the "mono" form win(x) r chi(xi/r) the integrand is continued by 0
    where rho falls under the node floor (chi bounded, r -> 0).
    """
    fields = compute_densities(psi, rho_floor_rel)
    grid = psi.grid
    win = sigma.window(grid.x)
    if sigma.kind == "window":
        integrand = win
    elif sigma.kind == "mass":
        integrand = win * fields.rho
    elif sigma.kind == "mass_squared":
        integrand = win * fields.rho**2
    elif sigma.kind == "current":
        integrand = win * fields.current
    else:  # mono
        integrand = np.zeros_like(fields.rho)
        good = ~fields.mask
        integrand[good] = win[good] * fields.rho[good] * sigma.chi(fields.velocity[good])
    return float(np.sum(integrand)) * grid.dx
