import numpy as np
import pytest

from semiphase.bohmian import (
    STATUS_ACTIVE,
    TrajectoryError,
    equivariance_error,
    integrate_trajectories,
    newtonian_residual,
    sample_initial,
)
from semiphase.grid import WaveFunction, make_grid
from semiphase.hydrodynamics import compute_densities
from semiphase.potentials import Free, Harmonic
from semiphase.schrodinger import EvolutionRecord, PropagatorConfig, propagate

from conftest import gaussian_packet, quantile_positions


def plane_wave_record(grid, eps, p0, t_final=1.0, n_snaps=51):
    times = np.linspace(0.0, t_final, n_snaps)
    states = np.array(
        [np.exp(1j * (p0 * grid.x - 0.5 * p0**2 * t) / eps) / np.sqrt(grid.length) for t in times]
    )
    return EvolutionRecord(
        grid=grid, eps=eps, times=times, states=states,
        masses=np.ones(n_snaps), energies=np.full(n_snaps, p0**2 / 2),
        mass_drift=0.0, energy_drift=0.0,
    )


@pytest.fixture(scope="module")
def coherent_record():
    eps = 1 / 64
    g = make_grid(-4, 4, 1024)
    psi = gaussian_packet(g, eps, x0=1.0)
    cfg = PropagatorConfig(eps=eps, dt=1e-3, t_final=np.pi, snapshot_stride=10)
    return propagate(psi, Harmonic(1.0), cfg)


# ----------------------------------------------------------------------
# sampling
# ----------------------------------------------------------------------

def test_sample_uniform_mean():
    # cells are node-centered, so the discrete uniform support is shifted by
    # dx/2; at n=1024 that bias is ~5e-4, inside the Monte Carlo budget
    g = make_grid(0.0, 1.0, 1024)
    rho = np.ones(g.n)
    pos, w = sample_initial(g, rho, 100_000, seed=3)
    assert np.all((pos >= -g.dx) & (pos <= 1.0 + g.dx))
    assert abs(pos.mean() - 0.5) < 5e-3
    assert w.sum() == pytest.approx(1.0)


def test_sample_single_hot_cell():
    g = make_grid(0.0, 1.0, 64)
    rho = np.zeros(g.n)
    rho[10] = 1.0 / g.dx
    pos, _ = sample_initial(g, rho, 500, seed=1)
    assert np.all(np.abs(pos - g.x[10]) <= 0.5 * g.dx + 1e-12)


def test_sample_deterministic_given_seed():
    g = make_grid(-2, 2, 128)
    psi = gaussian_packet(g, 1 / 16)
    rho = compute_densities(psi).rho
    p1, _ = sample_initial(g, rho, 1000, seed=42)
    p2, _ = sample_initial(g, rho, 1000, seed=42)
    p3, _ = sample_initial(g, rho, 1000, seed=43)
    assert np.array_equal(p1, p2)
    assert not np.array_equal(p1, p3)


def test_sample_rejects_unnormalized():
    g = make_grid(0.0, 1.0, 64)
    with pytest.raises(ValueError, match="integrate to 1"):
        sample_initial(g, 2.0 * np.ones(g.n), 10, seed=0)


# ----------------------------------------------------------------------
# trajectory integration
# ----------------------------------------------------------------------

def test_plane_wave_trajectories_exact():
    eps, p0 = 1 / 16, 0.5
    g = make_grid(0, 2 * np.pi, 64)
    rec = plane_wave_record(g, eps, p0)
    x0 = np.array([0.5, 1.7, 4.0])
    ens = integrate_trajectories(rec, x0, np.full(3, 1 / 3))
    exact = x0[None, :] + p0 * rec.times[:, None]
    assert np.max(np.abs(ens.positions - exact)) < 1e-10
    assert np.max(np.abs(ens.momenta - p0)) < 1e-12
    assert ens.stalled_fraction == 0.0


def test_free_gaussian_trajectories_follow_analytic_spreading():
    # pilot wave: the packet spreads as sqrt(1 + t^2); u(t, x) = x t / (1 + t^2)
    eps = 1 / 64
    g = make_grid(-16, 16, 2048)
    psi = gaussian_packet(g, eps)
    cfg = PropagatorConfig(eps=eps, dt=1e-3, t_final=1.0, snapshot_stride=10)
    rec = propagate(psi, Free(), cfg)
    x0 = np.linspace(-0.3, 0.3, 33)
    ens = integrate_trajectories(rec, x0, np.full(x0.size, 1 / x0.size))
    exact = x0[None, :] * np.sqrt(1 + ens.times[:, None] ** 2)
    assert np.max(np.abs(ens.positions - exact)) < 1e-6


def test_coherent_ensemble_centroid_tracks_classical(coherent_record):
    rec = coherent_record
    g = rec.grid
    rho0 = compute_densities(rec.wave_function(0)).rho
    pos0 = quantile_positions(g, rho0, 2000)
    w = np.full(2000, 1 / 2000)
    ens = integrate_trajectories(rec, pos0, w)
    centroid = ens.positions @ w
    classical = np.cos(ens.times)  # x0 = 1, p0 = 0
    assert np.max(np.abs(centroid - classical)) < 1e-4


def test_trajectories_never_cross(coherent_record):
    rec = coherent_record
    rho0 = compute_densities(rec.wave_function(0)).rho
    pos0, w = sample_initial(rec.grid, rho0, 500, seed=5)
    ens = integrate_trajectories(rec, pos0, w)
    assert ens.order_violations == 0


def test_trajectories_deterministic(coherent_record):
    rec = coherent_record
    rho0 = compute_densities(rec.wave_function(0)).rho
    pos0, w = sample_initial(rec.grid, rho0, 200, seed=11)
    e1 = integrate_trajectories(rec, pos0, w, seed=11)
    e2 = integrate_trajectories(rec, pos0, w, seed=11)
    assert np.array_equal(e1.positions, e2.positions)
    assert np.array_equal(e1.momenta, e2.momenta)


def test_node_stall_policy():
    # an eigenstate-like pilot wave with hard nodes: particles near nodes freeze
    eps = 1 / 8
    g = make_grid(-8, 8, 512)
    vals = (g.x / np.sqrt(eps)) * np.exp(-g.x**2 / (2 * eps))  # first excited state shape
    vals = vals / g.l2_norm(vals)
    times = np.linspace(0, 0.1, 11)
    states = np.array([vals.astype(complex) * np.exp(-1j * 1.5 * t) for t in times])
    rec = EvolutionRecord(grid=g, eps=eps, times=times, states=states,
                          masses=np.ones(11), energies=np.ones(11),
                          mass_drift=0.0, energy_drift=0.0)
    pos0 = np.array([0.0])  # exactly on the node
    ens = integrate_trajectories(rec, pos0, np.array([1.0]), max_stalled_fraction=1.0)
    assert ens.status[0] != STATUS_ACTIVE


def test_excess_stalling_is_hard_error():
    eps = 1 / 8
    g = make_grid(-8, 8, 512)
    vals = (g.x / np.sqrt(eps)) * np.exp(-g.x**2 / (2 * eps))
    vals = vals / g.l2_norm(vals)
    times = np.linspace(0, 0.1, 11)
    states = np.array([vals.astype(complex)] * 11)
    rec = EvolutionRecord(grid=g, eps=eps, times=times, states=states,
                          masses=np.ones(11), energies=np.ones(11),
                          mass_drift=0.0, energy_drift=0.0)
    pos0 = np.full(10, 0.0)
    with pytest.raises(TrajectoryError, match="not active"):
        integrate_trajectories(rec, pos0, np.full(10, 0.1), max_stalled_fraction=0.05)


# ----------------------------------------------------------------------
# equivariance
# ----------------------------------------------------------------------

def test_equivariance_sampling_error_at_t0():
    g = make_grid(0.0, 1.0, 64)
    rho = np.ones(g.n)
    pos, w = sample_initial(g, rho, 10_000, seed=9)
    assert equivariance_error(pos, w, g, rho) < 2e-2


def test_equivariance_constant_under_rigid_transport():
    eps, p0 = 1 / 16, 0.5
    g = make_grid(0, 2 * np.pi, 64)
    rec = plane_wave_record(g, eps, p0)
    pos0, w = np.array([0.4, 2.0, 5.1]), np.full(3, 1 / 3)
    ens = integrate_trajectories(rec, pos0, w)
    rho = np.full(g.n, 1 / g.length)
    errs = [equivariance_error(ens.positions[k], w, g, rho) for k in (0, 25, 50)]
    assert max(errs) - min(errs) < 1e-10


def test_equivariance_harmonic_coherent(coherent_record):
    rec = coherent_record
    rho0 = compute_densities(rec.wave_function(0)).rho
    pos0, w = sample_initial(rec.grid, rho0, 10_000, seed=123)
    ens = integrate_trajectories(rec, pos0, w)
    e0 = equivariance_error(ens.positions[0], w, rec.grid, rho0)
    rho_t = compute_densities(rec.wave_function(len(rec) - 1)).rho
    et = equivariance_error(ens.positions[-1], w, rec.grid, rho_t)
    assert et < 2e-2
    assert et <= 3.0 * e0


# ----------------------------------------------------------------------
# momentum balance residual
# ----------------------------------------------------------------------

def test_residual_plane_wave():
    eps, p0 = 1 / 16, 0.5
    g = make_grid(0, 2 * np.pi, 64)
    rec = plane_wave_record(g, eps, p0)
    ens = integrate_trajectories(rec, np.array([0.5, 2.5]), np.full(2, 0.5))
    res = newtonian_residual(ens, rec, Free())
    assert res.max_abs < 1e-8


def test_residual_free_gaussian_halving_dt():
    eps = 1 / 64
    g = make_grid(-16, 16, 2048)
    psi = gaussian_packet(g, eps)

    def run(dt):
        cfg = PropagatorConfig(eps=eps, dt=dt, t_final=0.2, snapshot_stride=1)
        rec = propagate(psi, Free(), cfg)
        rho0 = compute_densities(rec.wave_function(0)).rho
        pos0 = quantile_positions(g, rho0, 100)
        ens = integrate_trajectories(rec, pos0, np.full(100, 1 / 100))
        return newtonian_residual(ens, rec, Free())

    r1 = run(1e-3)
    assert r1.max_abs < 1e-3
    r2 = run(5e-4)
    ratio = r1.max_abs / r2.max_abs
    assert 2.5 < ratio < 6.0


def test_residual_coherent_state_is_classical():
    eps = 1 / 64
    g = make_grid(-4, 4, 1024)
    psi = gaussian_packet(g, eps, x0=1.0)
    cfg = PropagatorConfig(eps=eps, dt=1e-3, t_final=0.5, snapshot_stride=1)
    rec = propagate(psi, Harmonic(1.0), cfg)
    rho0 = compute_densities(rec.wave_function(0)).rho
    pos0 = quantile_positions(g, rho0, 200)
    ens = integrate_trajectories(rec, pos0, np.full(200, 1 / 200))
    res = newtonian_residual(ens, rec, Harmonic(1.0))
    assert res.max_abs < 1e-6


def test_trajectory_pairs_push_forward_phase_space_measure(coherent_record):
    # the (X_i, P_i) pairs transported from the initial graph measure match
    # the velocity-graph measure of the evolved state (sampling-limited)
    from semiphase.phasespace import PhaseSpaceMeasure, bohmian_measure, measure_distance

    rec = coherent_record
    rho0 = compute_densities(rec.wave_function(0)).rho
    pos0, w = sample_initial(rec.grid, rho0, 10_000, seed=314)
    ens = integrate_trajectories(rec, pos0, w)
    k = len(rec) - 1
    transported = PhaseSpaceMeasure(x=ens.positions[k], p=ens.momenta[k], weights=w)
    target = bohmian_measure(rec.wave_function(k))
    d_t = measure_distance(transported, target)
    initial = PhaseSpaceMeasure(x=ens.positions[0], p=ens.momenta[0], weights=w)
    d_0 = measure_distance(initial, bohmian_measure(rec.wave_function(0)))
    assert d_t < 2e-2
    assert d_t <= 3.0 * d_0 + 1e-4
