"""Hamilton-Jacobi characteristics, caustic detection, WKB reconstruction
and the classical Liouville push-forward.

Characteristics follow dX/dt = P, dP/dt = -V'(X) from (x0, S0'(x0)); the
linearization J = dX/dx0 is integrated alongside (dJx/dt = Jp,
dJp/dt = -V''(X) Jx) and the transported amplitude is a0 / sqrt(|Jx|).  The
action S0(x0) + int (P^2/2 - V) dt accumulates along each ray so that the
reconstructed phase solves the eikonal equation up to integration error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline

from ..grid import UniformGrid, WaveFunction
from ..phasespace import PhaseSpaceMeasure
from ..potentials import Potential
from .families import PhaseSpec, Profile

RK_DT = 1e-3


@dataclass(frozen=True)
class WKBState:
    """Characteristic data of a single-phase WKB solution at one time."""

    t: float
    seeds: np.ndarray        # x0
    positions: np.ndarray    # X(t, x0)
    momenta: np.ndarray      # P(t, x0) = grad S along the ray
    jacobian: np.ndarray     # dX/dx0
    amplitude: np.ndarray    # a0(x0) / sqrt(|J|)
    action: np.ndarray       # S(t) along the ray
    caustic: bool            # some Jacobian reached <= 0


def _flow_rhs(state: np.ndarray, potential: Potential) -> np.ndarray:
    x, p, jx, jp = state[0], state[1], state[2], state[3]
    out = np.empty_like(state)
    out[0] = p
    out[1] = -potential.grad(x)
    out[2] = jp
    out[3] = -potential.curvature(x) * jx
    out[4] = 0.5 * p**2 - potential.value(x)
    return out


def _rk4_flow(state: np.ndarray, potential: Potential, t: float, dt: float = RK_DT) -> np.ndarray:
    """Integrate the characteristic system to time t with fixed-step RK4."""
    if t < 0:
        raise ValueError("flow time must be >= 0")
    remaining = t
    out = state.copy()
    while remaining > 1e-15:
        h = min(dt, remaining)
        k1 = _flow_rhs(out, potential)
        k2 = _flow_rhs(out + 0.5 * h * k1, potential)
        k3 = _flow_rhs(out + 0.5 * h * k2, potential)
        k4 = _flow_rhs(out + h * k3, potential)
        out = out + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        remaining -= h
    return out


def _seed_state(phase: PhaseSpec, seeds: np.ndarray) -> np.ndarray:
    state = np.zeros((5, seeds.size))
    state[0] = seeds
    state[1] = phase.derivative(seeds)
    state[2] = 1.0
    state[3] = phase.second_derivative(seeds)
    state[4] = phase.value(seeds)
    return state


def hj_characteristics(
    phase: PhaseSpec,
    amplitude: Profile,
    potential: Potential,
    t: float,
    n_seeds: int = 2048,
    x_span: tuple[float, float] | None = None,
    amplitude_center: float = 0.0,
    rk_dt: float = RK_DT,
) -> WKBState:
    """Flow seeds (x0, S0'(x0)) to time t, carrying Jacobian, amplitude, action.

    When any Jacobian is <= 0 the caustic flag is set and the folded
    amplitudes are marked invalid (NaN); no multi-branch resolution is done.
    """
    if x_span is None:
        r = amplitude.support_radius
        x_span = (amplitude_center - r, amplitude_center + r)
    seeds = np.linspace(x_span[0], x_span[1], n_seeds)
    state = _rk4_flow(_seed_state(phase, seeds), potential, t, rk_dt)
    jac = state[2]
    caustic = bool(np.min(jac) <= 0.0)
    a0 = amplitude(seeds - amplitude_center)
    amp = np.full(seeds.size, np.nan)
    ok = jac > 0.0
    amp[ok] = a0[ok] / np.sqrt(jac[ok])
    if caustic:
        warnings.warn(f"caustic reached at or before t={t:.6g}; folded rays invalidated", stacklevel=2)
    return WKBState(
        t=t,
        seeds=seeds,
        positions=state[0],
        momenta=state[1],
        jacobian=jac,
        amplitude=amp,
        action=state[4],
        caustic=caustic,
    )


def caustic_time(
    phase: PhaseSpec,
    potential: Potential,
    horizon: float,
    n_seeds: int = 2048,
    x_span: tuple[float, float] = (-8.0, 8.0),
    march_dt: float = 1e-2,
    tol: float = 1e-8,
) -> float | None:
    """First time the minimal Jacobian over seeds crosses zero, or None.

    A coarse march brackets the crossing, bisection refines it to ``tol``,
    and the seed set is zoomed once around the folding ray so the discrete
    minimum tracks the continuum one.
    """

    def first_crossing(seed_arr: np.ndarray) -> tuple[float, int] | None:
        state = _seed_state(phase, seed_arr)
        t = 0.0
        prev = state
        while t < horizon - 1e-15:
            h = min(march_dt, horizon - t)
            nxt = _rk4_flow(prev, potential, h, march_dt)
            if np.min(nxt[2]) <= 0.0:
                lo_t, hi_t = 0.0, h
                base = prev
                for _ in range(64):
                    mid = 0.5 * (lo_t + hi_t)
                    probe = _rk4_flow(base, potential, mid, march_dt)
                    if np.min(probe[2]) <= 0.0:
                        hi_t = mid
                    else:
                        lo_t = mid
                    if hi_t - lo_t < tol:
                        break
                cross = t + 0.5 * (lo_t + hi_t)
                probe = _rk4_flow(base, potential, hi_t, march_dt)
                return cross, int(np.argmin(probe[2]))
            prev = nxt
            t += h
        return None

    seeds = np.linspace(x_span[0], x_span[1], n_seeds)
    hit = first_crossing(seeds)
    if hit is None:
        return None
    _, idx = hit
    spacing = seeds[1] - seeds[0]
    lo = seeds[max(idx - 2, 0)]
    hi = seeds[min(idx + 2, n_seeds - 1)]
    zoom = np.linspace(lo, hi, 129)
    refined = first_crossing(zoom)
    if refined is None:  # fold sits between coarse seeds; keep the coarse answer
        return hit[0]
    return refined[0]


def wkb_wavefunction(state: WKBState, eps: float, grid: UniformGrid) -> WaveFunction:
    """Interpolate amplitude and phase from the rays onto the grid and form
    a exp(i S / eps), normalized to unit mass.

    Requires a pre-caustic state with monotone ray positions.  The phase
    interpolant's derivative is checked against the transported momenta
    (eikonal consistency) and a warning is emitted if they disagree.
    """
    if state.caustic:
        raise ValueError("cannot build a single-phase wave function at or beyond a caustic")
    X = state.positions
    if np.any(np.diff(X) <= 0.0):
        raise ValueError("ray positions are not monotone; the phase is not single-valued")

    s_spline = CubicSpline(X, state.action)
    a_spline = CubicSpline(X, state.amplitude)

    consistency = float(np.max(np.abs(s_spline.derivative()(X[1:-1]) - state.momenta[1:-1])))
    scale = max(1.0, float(np.max(np.abs(state.momenta))))
    if consistency > 1e-5 * scale:
        warnings.warn(
            f"phase interpolant deviates from ray momenta by {consistency:.3e}; "
            "increase the seed count",
            stacklevel=2,
        )

    x = grid.x
    inside = (x >= X[0]) & (x <= X[-1])
    amp = np.zeros(grid.n)
    phase_vals = np.zeros(grid.n)
    amp[inside] = a_spline(x[inside])
    phase_vals[inside] = s_spline(x[inside])
    phase_vals[~inside] = np.where(x[~inside] < X[0], state.action[0], state.action[-1])

    vals = amp.astype(complex) * np.exp(1j * phase_vals / eps)
    norm = grid.l2_norm(vals)
    if norm == 0.0:
        raise ValueError("WKB state has no support on this grid")
    return WaveFunction(grid, vals / norm, eps)


def classical_flow(
    x: np.ndarray, p: np.ndarray, potential: Potential, t: float, dt: float = RK_DT
) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonian point flow (x, p) -> (X_t, P_t) by fixed-step RK4."""
    x = np.asarray(x, dtype=float).copy()
    p = np.asarray(p, dtype=float).copy()
    sign = 1.0
    if t < 0:
        sign, t = -1.0, -t
    remaining = t
    while remaining > 1e-15:
        h = sign * min(dt, remaining)

        def rhs(xx, pp):
            return pp, -potential.grad(xx)

        k1x, k1p = rhs(x, p)
        k2x, k2p = rhs(x + 0.5 * h * k1x, p + 0.5 * h * k1p)
        k3x, k3p = rhs(x + 0.5 * h * k2x, p + 0.5 * h * k2p)
        k4x, k4p = rhs(x + h * k3x, p + h * k3p)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        p = p + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        remaining -= abs(h)
    return x, p


def liouville_pushforward(
    measure: PhaseSpaceMeasure, potential: Potential, t: float, dt: float = RK_DT
) -> PhaseSpaceMeasure:
    """Transport every particle by the classical flow; weights unchanged."""
    x, p = classical_flow(measure.x, measure.p, potential, t, dt)
    return replace(measure, x=x, p=p, histogram=None, provenance="ensemble", grid=None)
