"""Closed-form limit measures of the case-study families, tabulated as
weighted particle lists.

Continuous momentum distributions are produced by high-resolution quadrature
(default 4096 nodes over the unit cell, profile variable or branch angle) and
then compressed into at most ``max_atoms`` mass-preserving atoms per axis so
that the sliced-W1 metric stays tractable; the compression moves mass by less
than one bin width.  All tabulations are normalized to unit total mass,
matching unit-mass synthesized states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..grid import UniformGrid, make_grid
from ..phasespace import PhaseSpaceMeasure
from ..potentials import Potential
from .families import (
    CaseStudyFamily,
    CoherentState,
    Concentrating,
    HarmonicEigenstate,
    ModulatedPlaneWave,
    PeriodicOscillatory,
    TwoPhaseWKB,
    WKBSingle,
)

CELL_NODES = 4096
MAX_ATOMS = 512
PRUNE_WEIGHT = 1e-16


@dataclass(frozen=True)
class AtomSet:
    values: np.ndarray
    weights: np.ndarray


def compress_atoms(values: np.ndarray, weights: np.ndarray, max_atoms: int = MAX_ATOMS) -> AtomSet:
    """Merge a weighted 1D atom list into <= max_atoms mass-weighted bin means.

    Atoms below 1e-14 of the peak weight are dropped first so the binning
    window tracks the mass-carrying support instead of stray tails.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    keep = weights > 1e-14 * float(weights.max())
    values, weights = values[keep], weights[keep]
    if values.size <= max_atoms:
        return AtomSet(values, weights)
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 0:
        return AtomSet(np.array([lo]), np.array([weights.sum()]))
    idx = np.minimum(((values - lo) / (hi - lo) * max_atoms).astype(int), max_atoms - 1)
    mass = np.bincount(idx, weights=weights, minlength=max_atoms)
    mean = np.bincount(idx, weights=weights * values, minlength=max_atoms)
    nz = mass > 0
    return AtomSet(mean[nz] / mass[nz], mass[nz])


def _product_measure(
    x_atoms: AtomSet, p_atoms: AtomSet, provenance: str = "closed-form-limit"
) -> PhaseSpaceMeasure:
    wx = x_atoms.weights / x_atoms.weights.sum()
    wp = p_atoms.weights / p_atoms.weights.sum()
    W = np.outer(wx, wp).ravel()
    X = np.repeat(x_atoms.values, p_atoms.values.size)
    P = np.tile(p_atoms.values, x_atoms.values.size)
    keep = W > PRUNE_WEIGHT
    W = W[keep] / W[keep].sum()
    return PhaseSpaceMeasure(x=X[keep], p=P[keep], weights=W, provenance=provenance)


def _envelope_atoms(
    profile_values: np.ndarray, positions: np.ndarray, max_atoms: int = MAX_ATOMS
) -> AtomSet:
    w = np.asarray(profile_values, dtype=float)
    return compress_atoms(positions, w / w.sum(), max_atoms)


def _x_positions(family, x_grid: UniformGrid | None, radius_scale: float = 1.0) -> np.ndarray:
    if x_grid is not None:
        return x_grid.x
    prof = family.profile if hasattr(family, "profile") else family.amplitude
    r = prof.support_radius * radius_scale
    return family.center + np.linspace(-r, r, CELL_NODES + 1)


def _profile_transform_atoms(conc: Concentrating, max_atoms: int) -> AtomSet:
    """Momentum distribution |FT f|^2 / (2 pi ||f||^2) of a concentrating profile."""
    r = max(8.0 * conc.profile.width, conc.profile.support_radius * 1.5)
    fine = make_grid(-r, r, 8192)
    f = conc.scaled_profile(fine.x)
    coeffs = fine.dft(f) * math.sqrt(fine.n) * fine.dx  # continuum FT at fine.wavenumbers
    dxi = 2.0 * math.pi / fine.length
    weights = np.abs(coeffs) ** 2 * dxi / (2.0 * math.pi)
    order = np.argsort(fine.wavenumbers)
    return compress_atoms(fine.wavenumbers[order], weights[order], max_atoms)


def limit_bohmian(
    family: CaseStudyFamily,
    x_grid: UniformGrid | None = None,
    t: float = 0.0,
    potential: Potential | None = None,
    cell_nodes: int = CELL_NODES,
    max_atoms: int = MAX_ATOMS,
) -> PhaseSpaceMeasure:
    """Small-eps limit of the velocity-graph measure of the family.

    ``t``/``potential`` only apply to WKBSingle, whose limit is transported
    along the characteristic flow (valid before the first caustic).
    """
    if isinstance(family, ModulatedPlaneWave):
        xs = _x_positions(family, x_grid)
        xa = _envelope_atoms(family.profile(xs - family.center) ** 2, xs, max_atoms)
        return _product_measure(xa, AtomSet(np.array([family.momentum]), np.array([1.0])))

    if isinstance(family, PeriodicOscillatory):
        xs = _x_positions(family, x_grid)
        xa = _envelope_atoms(family.profile(xs - family.center) ** 2, xs, max_atoms)
        y = np.linspace(0.0, 2.0 * math.pi, cell_nodes, endpoint=False)
        g = family.g_values(y)
        dens = np.abs(g) ** 2
        live = dens > 1e-14 * dens.max()
        vel = np.zeros_like(dens)
        vel[live] = np.imag(family.g_derivative(y)[live] / g[live])
        pa = compress_atoms(vel[live], dens[live], max_atoms)
        return _product_measure(xa, pa)

    if isinstance(family, Concentrating):
        y = np.linspace(-family.profile.support_radius, family.profile.support_radius, cell_nodes + 1)
        f = family.scaled_profile(y)
        dens = np.abs(f) ** 2
        live = dens > 1e-14 * dens.max()
        vel = np.zeros_like(dens)
        # Im(f'/f) of the chirped profile: the chirp contributes chirp * y
        vel[live] = family.chirp * y[live]
        pa = compress_atoms(vel[live], dens[live], max_atoms)
        return _product_measure(AtomSet(np.array([family.center]), np.array([1.0])), pa)

    if isinstance(family, CoherentState):
        return PhaseSpaceMeasure(
            x=np.array([family.center]),
            p=np.array([family.momentum]),
            weights=np.array([1.0]),
            provenance="closed-form-limit",
        )

    if isinstance(family, HarmonicEigenstate):
        # classical sojourn (arcsine) density on the turning interval, p = 0
        radius = math.sqrt(2.0 * family.energy)
        phi = (np.arange(cell_nodes) + 0.5) / cell_nodes * math.pi - 0.5 * math.pi
        xs = radius * np.sin(phi)
        xa = AtomSet(xs, np.full(cell_nodes, 1.0 / cell_nodes))
        return _product_measure(xa, AtomSet(np.array([0.0]), np.array([1.0])))

    if isinstance(family, TwoPhaseWKB):
        xs = _x_positions(family, x_grid)
        a1sq = family.amplitude(xs - family.center) ** 2
        xa = _envelope_atoms(a1sq * (1.0 + family.ratio**2), xs, max_atoms)
        theta = np.linspace(0.0, 2.0 * math.pi, cell_nodes, endpoint=False)
        c = family.ratio
        n_theta = 1.0 + c**2 + 2.0 * c * np.cos(theta)
        phi_theta = (
            family.slope1 + c**2 * family.slope2 + c * np.cos(theta) * (family.slope1 + family.slope2)
        ) / n_theta
        pa = compress_atoms(phi_theta, n_theta, max_atoms)
        return _product_measure(xa, pa)

    if isinstance(family, WKBSingle):
        from .wkb import hj_characteristics  # deferred: avoids a module cycle

        if t == 0.0:
            xs = _x_positions(family, x_grid)
            amp2 = family.amplitude(xs - family.center) ** 2
            keep = amp2 > PRUNE_WEIGHT * amp2.max()
            w = amp2[keep] / amp2[keep].sum()
            return PhaseSpaceMeasure(
                x=xs[keep],
                p=family.phase.derivative(xs[keep]),
                weights=w,
                provenance="closed-form-limit",
            )
        if potential is None:
            raise ValueError("transporting a WKB limit needs the potential")
        r = family.amplitude.support_radius
        state = hj_characteristics(
            family.phase,
            family.amplitude,
            potential,
            t,
            n_seeds=cell_nodes,
            x_span=(family.center - r, family.center + r),
            amplitude_center=family.center,
        )
        if state.caustic:
            raise ValueError(f"no single-phase limit beyond the first caustic (t={t})")
        amp2 = family.amplitude(state.seeds - family.center) ** 2
        keep = amp2 > PRUNE_WEIGHT * amp2.max()
        w = amp2[keep] / amp2[keep].sum()
        return PhaseSpaceMeasure(
            x=state.positions[keep],
            p=state.momenta[keep],
            weights=w,
            provenance="closed-form-limit",
        )

    raise TypeError(f"no implemented limit for {type(family).__name__}")


def limit_wigner(
    family: CaseStudyFamily,
    x_grid: UniformGrid | None = None,
    t: float = 0.0,
    potential: Potential | None = None,
    cell_nodes: int = CELL_NODES,
    max_atoms: int = MAX_ATOMS,
) -> PhaseSpaceMeasure:
    """Small-eps limit of the Wigner transform of the family."""
    if isinstance(family, ModulatedPlaneWave):
        return limit_bohmian(family, x_grid, max_atoms=max_atoms)

    if isinstance(family, PeriodicOscillatory):
        xs = _x_positions(family, x_grid)
        xa = _envelope_atoms(family.profile(xs - family.center) ** 2, xs, max_atoms)
        if family.harmonics is not None:
            qs = np.array(sorted(int(q) for q in family.harmonics))
            wts = np.array([abs(complex(family.harmonics[q])) ** 2 for q in qs])
        else:
            # Fourier coefficients of exp(i theta(y)) computed on the cell
            y = np.linspace(0.0, 2.0 * math.pi, cell_nodes, endpoint=False)
            spec = np.fft.fft(np.exp(1j * family.phase(y))) / cell_nodes
            mode = np.fft.fftfreq(cell_nodes, d=1.0 / cell_nodes)
            power = np.abs(spec) ** 2
            keep = power > 1e-12 * power.sum()
            qs, wts = mode[keep], power[keep]
        pa = AtomSet(qs.astype(float), wts)
        return _product_measure(xa, pa)

    if isinstance(family, Concentrating):
        pa = _profile_transform_atoms(family, max_atoms)
        return _product_measure(AtomSet(np.array([family.center]), np.array([1.0])), pa)

    if isinstance(family, CoherentState):
        return limit_bohmian(family)

    if isinstance(family, HarmonicEigenstate):
        # uniform measure on the energy circle p^2/2 + x^2/2 = energy
        radius = math.sqrt(2.0 * family.energy)
        theta = (np.arange(cell_nodes) + 0.5) / cell_nodes * 2.0 * math.pi
        return PhaseSpaceMeasure(
            x=radius * np.cos(theta),
            p=radius * np.sin(theta),
            weights=np.full(cell_nodes, 1.0 / cell_nodes),
            provenance="closed-form-limit",
        )

    if isinstance(family, TwoPhaseWKB):
        xs = _x_positions(family, x_grid)
        a1sq = family.amplitude(xs - family.center) ** 2
        keep = a1sq > PRUNE_WEIGHT * a1sq.max()
        xs, a1sq = xs[keep], a1sq[keep]
        total = a1sq.sum() * (1.0 + family.ratio**2)
        x2 = np.concatenate([xs, xs])
        p2 = np.concatenate([np.full(xs.size, family.slope1), np.full(xs.size, family.slope2)])
        w2 = np.concatenate([a1sq, family.ratio**2 * a1sq]) / total
        return PhaseSpaceMeasure(x=x2, p=p2, weights=w2, provenance="closed-form-limit")

    if isinstance(family, WKBSingle):
        # before caustics the Wigner and velocity-graph limits coincide
        return limit_bohmian(family, x_grid, t=t, potential=potential, cell_nodes=cell_nodes, max_atoms=max_atoms)

    raise TypeError(f"no implemented limit for {type(family).__name__}")
