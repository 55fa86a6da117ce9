"""Bohmian trajectory ensembles driven by the velocity field of a pilot wave.

Particles are sampled from the initial density by inverse-CDF sampling,
integrated with fixed-step RK4 along dX/dt = u(t, X), and carry the
interpolated velocity as their momentum record.  The velocity field is
interpolated cubically in time across four snapshots and (by default)
cubically in space; particles that run into the node mask are frozen and
flagged rather than regularized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import w1_points_vs_density
from .grid import UniformGrid
from .hydrodynamics import DEFAULT_RHO_FLOOR_REL, compute_densities
from .potentials import Potential
from .schrodinger import EvolutionRecord

STATUS_ACTIVE = 0
STATUS_NODE_STALLED = 1
STATUS_LEFT_DOMAIN = 2

STATUS_NAMES = {
    STATUS_ACTIVE: "active",
    STATUS_NODE_STALLED: "node-stalled",
    STATUS_LEFT_DOMAIN: "left-domain",
}


class TrajectoryError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Weighted particle world lines X_i(t_k) with momenta P_i(t_k) = u(t_k, X_i)."""

    times: np.ndarray         # (n_t,)
    positions: np.ndarray     # (n_t, N)
    momenta: np.ndarray       # (n_t, N)
    weights: np.ndarray       # (N,), summing to 1
    status: np.ndarray        # (N,) final per-particle status code
    seed: int | None = None
    order_violations: int = 0

    @property
    def n_particles(self) -> int:
        return self.positions.shape[1]

    @property
    def stalled_fraction(self) -> float:
        return float(np.count_nonzero(self.status != STATUS_ACTIVE)) / self.n_particles


def sample_initial(
    grid: UniformGrid,
    rho0: np.ndarray,
    n_particles: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Inverse-CDF sampling of the grid density with linear interpolation
    within cells; deterministic given the seed, equal weights 1/N."""
    rho0 = np.asarray(rho0, dtype=float)
    total = float(rho0.sum()) * grid.dx
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"initial density must integrate to 1, got {total:.10e}")
    if n_particles < 1:
        raise ValueError("need at least one particle")

    edges = grid.x_min - 0.5 * grid.dx + grid.dx * np.arange(grid.n + 1)
    cdf = np.concatenate([[0.0], np.cumsum(rho0) * grid.dx]) / total
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, size=n_particles)
    positions = np.interp(u, cdf, edges)
    weights = np.full(n_particles, 1.0 / n_particles)
    return positions, weights


class _VelocityInterpolant:
    """Space-time interpolation of the velocity field of an evolution record."""

    def __init__(self, record: EvolutionRecord, rho_floor_rel: float, interpolation: str):
        self.grid = record.grid
        self.times = record.times
        self.interpolation = interpolation
        fields = [compute_densities(record.wave_function(i), rho_floor_rel) for i in range(len(record))]
        self.velocity = np.asarray([f.velocity for f in fields])
        self.rho = np.asarray([f.rho for f in fields])
        self.floors = np.asarray([f.rho_floor for f in fields])
        if np.any(np.diff(record.times) <= 0):
            raise TrajectoryError("snapshot times must be strictly increasing")

    def _time_weights(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Cubic Lagrange weights on the four snapshots framing time t."""
        nt = len(self.times)
        if nt == 1:
            return np.array([0]), np.array([1.0])
        j = int(np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, nt - 2))
        count = min(4, nt)
        lo = int(np.clip(j - 1, 0, nt - count))
        idx = np.arange(lo, lo + count)
        nodes = self.times[idx]
        weights = np.ones(count)
        for a in range(count):
            for b in range(count):
                if a != b:
                    weights[a] *= (t - nodes[b]) / (nodes[a] - nodes[b])
        return idx, weights

    def fields_at(self, t: float) -> tuple[np.ndarray, np.ndarray, float]:
        idx, wts = self._time_weights(t)
        u = np.tensordot(wts, self.velocity[idx], axes=1)
        rho = np.tensordot(wts, self.rho[idx], axes=1)
        floor = float(np.max(self.floors[idx]))
        return u, rho, floor

    def velocity_at(self, u_field: np.ndarray, positions: np.ndarray) -> np.ndarray:
        wrapped = self.grid.wrap(positions)
        vals = self.grid.interpolate(u_field, wrapped, mode=self.interpolation)
        return np.real(vals)

    def density_at(self, rho_field: np.ndarray, positions: np.ndarray) -> np.ndarray:
        wrapped = self.grid.wrap(positions)
        return np.real(self.grid.interpolate(rho_field, wrapped, mode=self.interpolation))


def integrate_trajectories(
    record: EvolutionRecord,
    positions0: np.ndarray,
    weights: np.ndarray,
    substeps_per_snapshot: int = 1,
    interpolation: str = "cubic",
    node_policy: str = "freeze",
    rho_floor_rel: float = DEFAULT_RHO_FLOOR_REL,
    max_stalled_fraction: float = 0.05,
    seed: int | None = None,
) -> TrajectoryEnsemble:
    """RK4 transport of an initial particle set along the record's velocity.

    The RK4 step is the snapshot spacing divided by ``substeps_per_snapshot``,
    so stage times never extrapolate beyond the stored snapshots.  Particles
    whose interpolated density falls under the node floor are frozen and
    flagged ``node-stalled`` (policy "freeze"); policy "clamp" keeps them
    moving with the velocity clamped to the last finite value.  More than
    ``max_stalled_fraction`` non-active particles is a hard error.
    """
    if node_policy not in ("freeze", "clamp"):
        raise ValueError(f"unknown node policy {node_policy!r}")
    weights = np.asarray(weights, dtype=float)
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("particle weights must sum to 1")

    interp = _VelocityInterpolant(record, rho_floor_rel, interpolation)
    grid = record.grid
    times = record.times
    n_t = len(times)
    n_particles = len(positions0)

    x = np.asarray(positions0, dtype=float).copy()
    status = np.full(n_particles, STATUS_ACTIVE, dtype=np.int8)
    positions = np.empty((n_t, n_particles))
    momenta = np.empty((n_t, n_particles))
    order_violations = 0

    margin = 2.0 * grid.dx  # outer cells where the pilot wave must have decayed

    def eval_momenta(t: float, xs: np.ndarray) -> np.ndarray:
        u_field, _, _ = interp.fields_at(t)
        return interp.velocity_at(u_field, xs)

    def flag_nodes(t: float, xs: np.ndarray) -> None:
        nonlocal status
        u_field, rho_field, floor = interp.fields_at(t)
        rho_here = interp.density_at(rho_field, xs)
        hit = (rho_here < floor) & (status == STATUS_ACTIVE)
        if node_policy == "freeze" and np.any(hit):
            status[hit] = STATUS_NODE_STALLED
        wrapped = grid.wrap(xs)
        off = ((wrapped < grid.x_min + margin) | (wrapped > grid.x_max - margin)) & (
            status == STATUS_ACTIVE
        )
        if np.any(off):
            status[off] = STATUS_LEFT_DOMAIN

    positions[0] = x
    momenta[0] = eval_momenta(times[0], x)
    flag_nodes(times[0], x)
    order0 = np.argsort(x, kind="stable")

    for k in range(n_t - 1):
        h = (times[k + 1] - times[k]) / substeps_per_snapshot
        for sub in range(substeps_per_snapshot):
            t = times[k] + sub * h
            active = status == STATUS_ACTIVE if node_policy == "freeze" else slice(None)
            u1_field, rho1, floor1 = interp.fields_at(t)
            u2_field, _, _ = interp.fields_at(t + 0.5 * h)
            u3_field, _, _ = interp.fields_at(t + h)

            xa = x[active]
            k1 = interp.velocity_at(u1_field, xa)
            k2 = interp.velocity_at(u2_field, xa + 0.5 * h * k1)
            k3 = interp.velocity_at(u2_field, xa + 0.5 * h * k2)
            k4 = interp.velocity_at(u3_field, xa + h * k3)
            x[active] = xa + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        flag_nodes(times[k + 1], x)
        positions[k + 1] = x
        momenta[k + 1] = eval_momenta(times[k + 1], x)
        act = status == STATUS_ACTIVE
        if np.count_nonzero(act) > 1:
            xs_sorted = x[order0]
            keep = act[order0]
            if np.any(np.diff(xs_sorted[keep]) < 0):
                order_violations += 1

    stalled = float(np.count_nonzero(status != STATUS_ACTIVE)) / n_particles
    if stalled > max_stalled_fraction:
        raise TrajectoryError(
            f"{stalled:.1%} of particles are not active (limit {max_stalled_fraction:.0%}); "
            "the scenario is unresolvable for trajectory transport"
        )

    return TrajectoryEnsemble(
        times=times.copy(),
        positions=positions,
        momenta=momenta,
        weights=weights.copy(),
        status=status,
        seed=seed,
        order_violations=order_violations,
    )


def equivariance_error(
    positions: np.ndarray,
    weights: np.ndarray,
    grid: UniformGrid,
    rho: np.ndarray,
) -> float:
    """Exact 1D W1 between the empirical particle measure and a grid density."""
    return w1_points_vs_density(positions, weights, grid, rho)


@dataclass(frozen=True)
class ResidualStats:
    max_abs: float
    median_abs: float
    n_samples: int


def newtonian_residual(
    ensemble: TrajectoryEnsemble,
    record: EvolutionRecord,
    potential: Potential,
    rho_floor_rel: float = DEFAULT_RHO_FLOOR_REL,
    interpolation: str = "cubic",
) -> ResidualStats:
    """Residual of the trajectory momentum balance dP/dt + grad V + grad V_B.

    dP/dt is a centered difference of the stored momentum series; the quantum
    force is interpolated from per-snapshot Bohm potential gradients, away
    from the node mask.  Expected size: O(dt^2) plus interpolation error.
    """
    grid = record.grid
    times = ensemble.times
    if len(times) < 3:
        raise ValueError("need at least three snapshot times for a centered difference")

    # grad V_B = -(eps^2/2) [grad(Lap sqrt(rho)) sqrt(rho) - Lap(sqrt(rho)) grad(sqrt(rho))] / rho:
    # every derivative acts on the smooth sqrt(rho), so no masked-field jumps
    # pollute the spectral differentiation.
    grad_vb = []
    masks = []
    for i in range(len(record)):
        fields = compute_densities(record.wave_function(i), rho_floor_rel)
        root = np.sqrt(fields.rho)
        lap_root = np.real(grid.laplacian(root))
        grad_root = np.real(grid.gradient(root))
        grad_lap_root = np.real(grid.gradient(lap_root))
        gvb = np.zeros_like(root)
        np.divide(
            grad_lap_root * root - lap_root * grad_root,
            fields.rho,
            out=gvb,
            where=~fields.mask,
        )
        gvb *= -0.5 * record.eps**2
        grad_vb.append(gvb)
        masks.append(fields.mask)

    residuals = []
    active = ensemble.status == STATUS_ACTIVE
    for k in range(1, len(times) - 1):
        dt_c = times[k + 1] - times[k - 1]
        dpdt = (ensemble.momenta[k + 1] - ensemble.momenta[k - 1]) / dt_c
        xs = grid.wrap(ensemble.positions[k])
        qforce = np.real(grid.interpolate(grad_vb[k], xs, mode=interpolation))
        # drop samples whose interpolation stencil touches the node mask
        cell = np.round((xs - grid.x_min) / grid.dx).astype(int) % grid.n
        near_mask = np.zeros(len(xs), dtype=bool)
        for shift in (-2, -1, 0, 1, 2):
            near_mask |= masks[k][(cell + shift) % grid.n]
        ok = active & ~near_mask
        r = dpdt[ok] + potential.grad(xs[ok]) + qforce[ok]
        residuals.append(np.abs(r))

    allr = np.concatenate(residuals) if residuals else np.array([])
    if allr.size == 0:
        raise ValueError("no residual samples away from the node mask")
    return ResidualStats(
        max_abs=float(np.max(allr)),
        median_abs=float(np.median(allr)),
        n_samples=int(allr.size),
    )
