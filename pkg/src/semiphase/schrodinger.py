"""Split-step spectral time propagation of eps-scaled wave functions.

The evolution  i eps d_t psi = -(eps^2/2) Lap psi + V psi  is advanced by
Strang splitting: half-step potential phase exp(-i dt V / (2 eps)), full
kinetic step multiplying mode xi by exp(-i dt eps xi^2 / 2), half-step
potential phase.  Every factor is unimodular, so the discrete mass is
conserved to roundoff per step; energy drift is O(dt^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import UniformGrid, WaveFunction, relative_boundary_amplitude
from .potentials import Potential


class PropagationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PropagatorConfig:
    eps: float
    dt: float
    t_final: float
    snapshot_stride: int = 1
    check_conservation: bool = True
    mass_drift_tol: float = 1e-12  # roundoff accumulates ~ sqrt(steps) * 1e-16
    boundary_tolerance: float = 1e-8  # relative edge amplitude triggering failure
    nan_check_interval: int = 100

    def __post_init__(self) -> None:
        if not (0.0 < self.eps <= 1.0):
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        # negative dt propagates backward (used by time-reversal checks)
        if self.dt == 0.0:
            raise ValueError("dt must be nonzero")
        if self.t_final < 0.0:
            raise ValueError(f"t_final must be >= 0, got {self.t_final}")
        if self.snapshot_stride < 1:
            raise ValueError(f"snapshot stride must be >= 1, got {self.snapshot_stride}")


@dataclass(frozen=True)
class EvolutionRecord:
    """Snapshots of a propagation run plus conservation diagnostics."""

    grid: UniformGrid
    eps: float
    times: np.ndarray            # strictly increasing, starting at 0
    states: np.ndarray           # (n_snapshots, n) complex
    masses: np.ndarray
    energies: np.ndarray
    mass_drift: float
    energy_drift: float

    def __len__(self) -> int:
        return len(self.times)

    def wave_function(self, index: int) -> WaveFunction:
        return WaveFunction(self.grid, self.states[index], self.eps)


@dataclass(frozen=True)
class EnergyBreakdown:
    total: float
    kinetic: float
    potential: float


def mass(psi: WaveFunction) -> float:
    """Total probability integral |psi|^2 dx on the grid."""
    return float(np.sum(np.abs(psi.values) ** 2)) * psi.grid.dx


def energy(psi: WaveFunction, potential: Potential) -> EnergyBreakdown:
    """(eps^2/2) |grad psi|^2 + V |psi|^2, kinetic part evaluated spectrally."""
    grid = psi.grid
    coeffs = grid.dft(psi.values)
    kin = 0.5 * psi.eps**2 * float(np.sum(grid.wavenumbers**2 * np.abs(coeffs) ** 2)) * grid.dx
    pot = float(np.sum(potential.value(grid.x) * np.abs(psi.values) ** 2)) * grid.dx
    return EnergyBreakdown(total=kin + pot, kinetic=kin, potential=pot)


def strang_step(psi: WaveFunction, potential: Potential, dt: float) -> WaveFunction:
    """One second-order split step; exactly norm preserving."""
    grid = psi.grid
    half_v = np.exp(-0.5j * dt * potential.value(grid.x) / psi.eps)
    kinetic = np.exp(-0.5j * dt * psi.eps * grid.wavenumbers**2)
    out = half_v * psi.values
    out = np.fft.ifft(kinetic * np.fft.fft(out))
    out = half_v * out
    return WaveFunction(grid, out, psi.eps)


def propagate(psi0: WaveFunction, potential: Potential, cfg: PropagatorConfig) -> EvolutionRecord:
    """Advance psi0 to t_final (rounded to a whole number of steps), recording
    snapshots every ``snapshot_stride`` steps plus the final state.

    Fails hard on NaN or when the wave reaches the domain edge above
    ``boundary_tolerance`` (relative amplitude), reporting the time stamp.
    """
    if cfg.eps != psi0.eps:
        raise ValueError(f"config eps {cfg.eps} does not match state eps {psi0.eps}")
    m0 = mass(psi0)
    if abs(m0 - 1.0) > 1e-10:
        raise ValueError(f"initial state must be normalized, got mass {m0:.12e}")

    grid = psi0.grid
    n_steps = int(round(cfg.t_final / abs(cfg.dt))) if cfg.t_final > 0 else 0
    half_v = np.exp(-0.5j * cfg.dt * potential.value(grid.x) / cfg.eps)
    kinetic = np.exp(-0.5j * cfg.dt * cfg.eps * grid.wavenumbers**2)

    def check_state(vals: np.ndarray, t: float) -> None:
        if not np.all(np.isfinite(vals.view(float))):
            raise PropagationError(f"non-finite wave function detected at t={t:.6g}")
        if relative_boundary_amplitude(vals) > cfg.boundary_tolerance:
            raise PropagationError(
                f"wave function reached the domain boundary at t={t:.6g} "
                f"(relative edge amplitude {relative_boundary_amplitude(vals):.3e})"
            )

    psi = psi0.values.copy()
    check_state(psi, 0.0)

    times = [0.0]
    states = [psi.copy()]
    for k in range(1, n_steps + 1):
        psi = half_v * psi
        psi = np.fft.ifft(kinetic * np.fft.fft(psi))
        psi = half_v * psi
        t = k * cfg.dt
        if cfg.nan_check_interval and k % cfg.nan_check_interval == 0:
            check_state(psi, t)
        if k % cfg.snapshot_stride == 0 or k == n_steps:
            check_state(psi, t)
            times.append(t)
            states.append(psi.copy())

    states_arr = np.asarray(states)
    times_arr = np.asarray(times)
    masses = np.sum(np.abs(states_arr) ** 2, axis=1) * grid.dx
    vx = potential.value(grid.x)
    xi2 = grid.wavenumbers**2
    coeffs = np.fft.fft(states_arr, axis=1) / math.sqrt(grid.n)
    kin = 0.5 * cfg.eps**2 * np.sum(xi2 * np.abs(coeffs) ** 2, axis=1) * grid.dx
    pot = np.sum(vx * np.abs(states_arr) ** 2, axis=1) * grid.dx
    energies = kin + pot

    mass_drift = float(np.max(np.abs(masses - masses[0])))
    energy_drift = float(np.max(np.abs(energies - energies[0])))
    if cfg.check_conservation and mass_drift > cfg.mass_drift_tol:
        raise PropagationError(f"mass drift {mass_drift:.3e} exceeds {cfg.mass_drift_tol:.1e}")

    return EvolutionRecord(
        grid=grid,
        eps=cfg.eps,
        times=times_arr,
        states=states_arr,
        masses=masses,
        energies=energies,
        mass_drift=mass_drift,
        energy_drift=energy_drift,
    )
