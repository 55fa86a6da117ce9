import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semiphase.grid import WaveFunction, make_grid
from semiphase.potentials import Free, Harmonic
from semiphase.schrodinger import (
    EnergyBreakdown,
    PropagationError,
    PropagatorConfig,
    energy,
    mass,
    propagate,
    strang_step,
)

from conftest import free_gaussian_exact, gaussian_packet


def test_mass_normalized_gaussian():
    g = make_grid(-8, 8, 256)
    psi = gaussian_packet(g, 1 / 16)
    assert mass(psi) == pytest.approx(1.0, abs=1e-12)


def test_mass_scaling_and_zero():
    g = make_grid(-8, 8, 256)
    psi = gaussian_packet(g, 1 / 16)
    doubled = WaveFunction(g, 2.0 * psi.values, psi.eps)
    assert mass(doubled) == pytest.approx(4.0, rel=1e-12)
    assert mass(WaveFunction(g, np.zeros(g.n), 0.5)) == 0.0


def test_energy_plane_wave():
    eps = 1 / 16
    p0 = 0.5  # p0/eps = 8: a resolved grid mode
    g = make_grid(0, 2 * np.pi, 64)
    vals = np.exp(1j * p0 * g.x / eps) / np.sqrt(g.length)
    e = energy(WaveFunction(g, vals, eps), Free())
    assert e.kinetic == pytest.approx(p0**2 / 2, rel=1e-12)
    assert e.potential == 0.0


def test_energy_gaussian_in_harmonic_closed_form():
    # for the width-matched packet: kinetic = eps/4, potential = eps/4
    eps = 1 / 64
    g = make_grid(-8, 8, 1024)
    psi = gaussian_packet(g, eps)
    e = energy(psi, Harmonic(1.0))
    assert e.kinetic == pytest.approx(eps / 4, rel=1e-10)
    assert e.potential == pytest.approx(eps / 4, rel=1e-10)
    assert e.total == pytest.approx(eps / 2, rel=1e-10)


def test_energy_zero_field():
    g = make_grid(-8, 8, 256)
    e = energy(WaveFunction(g, np.zeros(g.n), 0.5), Harmonic(1.0))
    assert e.total == 0.0


def test_strang_step_free_is_exact_per_mode():
    eps = 1 / 16
    g = make_grid(0, 2 * np.pi, 64)
    p0 = 0.5
    psi = WaveFunction(g, np.exp(1j * p0 * g.x / eps) / np.sqrt(g.length), eps)
    dt = 0.37
    out = strang_step(psi, Free(), dt)
    exact = psi.values * np.exp(-0.5j * dt * p0**2 / eps)
    assert np.max(np.abs(out.values - exact)) < 1e-13


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_strang_step_preserves_mass(seed):
    eps = 1 / 8
    g = make_grid(-4, 4, 128)
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=g.n) + 1j * rng.normal(size=g.n)
    psi = WaveFunction(g, vals / g.l2_norm(vals), eps)
    out = strang_step(psi, Harmonic(1.0), 1e-3)
    assert abs(mass(out) - mass(psi)) < 1e-14


def test_coherent_center_tracks_classical_oscillator():
    eps = 1 / 64
    g = make_grid(-4, 4, 1024)
    psi = gaussian_packet(g, eps, x0=1.0)
    cfg = PropagatorConfig(eps=eps, dt=1e-3, t_final=np.pi, snapshot_stride=314)
    rec = propagate(psi, Harmonic(1.0), cfg)
    center = np.sum(g.x * np.abs(rec.states[-1]) ** 2) * g.dx
    assert abs(center - np.cos(rec.times[-1])) < 1e-5


def test_free_gaussian_matches_closed_form():
    eps = 1 / 64
    g = make_grid(-16, 16, 2048)
    psi = gaussian_packet(g, eps)
    cfg = PropagatorConfig(eps=eps, dt=1e-2, t_final=1.0, snapshot_stride=100)
    rec = propagate(psi, Free(), cfg)
    err = g.l2_norm(rec.states[-1] - free_gaussian_exact(g, eps, rec.times[-1]))
    assert err < 1e-10


def test_harmonic_period_fidelity():
    # the width-matched packet is periodic with period 2 pi (up to phase)
    eps = 1 / 64
    g = make_grid(-4, 4, 512)
    psi = gaussian_packet(g, eps, x0=0.5)
    cfg = PropagatorConfig(eps=eps, dt=1e-4, t_final=2 * np.pi, snapshot_stride=62832,
                           mass_drift_tol=1e-11)
    rec = propagate(psi, Harmonic(1.0), cfg)
    overlap = abs(np.sum(np.conj(psi.values) * rec.states[-1]) * g.dx)
    assert overlap > 1 - 1e-6


def test_propagate_zero_time_returns_initial_only():
    g = make_grid(-8, 8, 256)
    psi = gaussian_packet(g, 1 / 16)
    rec = propagate(psi, Free(), PropagatorConfig(eps=1 / 16, dt=1e-3, t_final=0.0))
    assert len(rec) == 1
    assert np.array_equal(rec.states[0], psi.values)


def test_propagate_rejects_unnormalized():
    g = make_grid(-8, 8, 256)
    psi = gaussian_packet(g, 1 / 16)
    bad = WaveFunction(g, 1.5 * psi.values, psi.eps)
    with pytest.raises(ValueError, match="normalized"):
        propagate(bad, Free(), PropagatorConfig(eps=1 / 16, dt=1e-3, t_final=0.1))


def test_propagate_detects_boundary_hit():
    eps = 1 / 16
    g = make_grid(-4, 4, 256)
    psi = gaussian_packet(g, eps, p0=1.5)  # drifts right, reaches the edge
    cfg = PropagatorConfig(eps=eps, dt=1e-3, t_final=4.0, snapshot_stride=50)
    with pytest.raises(PropagationError, match="boundary"):
        propagate(psi, Free(), cfg)


def test_energy_drift_scales_as_dt_squared():
    eps = 1 / 32
    g = make_grid(-4, 4, 512)
    psi = gaussian_packet(g, eps, x0=0.7)
    drifts = []
    for dt in (2e-3, 1e-3):
        cfg = PropagatorConfig(eps=eps, dt=dt, t_final=2.0, snapshot_stride=25)
        drifts.append(propagate(psi, Harmonic(1.0), cfg).energy_drift)
    assert 3.0 < drifts[0] / drifts[1] < 5.0


def test_time_reversal():
    eps = 1 / 32
    g = make_grid(-4, 4, 512)
    psi = gaussian_packet(g, eps, x0=0.7)
    fwd = propagate(psi, Harmonic(1.0), PropagatorConfig(eps=eps, dt=1e-3, t_final=1.0,
                                                         snapshot_stride=1000))
    at_t = WaveFunction(g, fwd.states[-1], eps)
    back = propagate(at_t, Harmonic(1.0), PropagatorConfig(eps=eps, dt=-1e-3, t_final=1.0,
                                                           snapshot_stride=1000))
    assert g.l2_norm(back.states[-1] - psi.values) < 1e-8


def test_continuity_residual_is_second_order_in_snapshot_spacing():
    # discrete d_t rho + div J on the free Gaussian, d_t by centered differences
    eps = 1 / 64
    g = make_grid(-16, 16, 1024)
    psi = gaussian_packet(g, eps)

    def residual(stride):
        cfg = PropagatorConfig(eps=eps, dt=1e-3, t_final=0.2, snapshot_stride=stride)
        rec = propagate(psi, Free(), cfg)
        k = len(rec) // 2
        h = rec.times[k + 1] - rec.times[k - 1]
        rho = np.abs(rec.states) ** 2
        drho = (rho[k + 1] - rho[k - 1]) / h
        wf = rec.wave_function(k)
        current = eps * np.imag(np.conj(wf.values) * g.gradient(wf.values))
        div = np.real(g.gradient(current))
        return np.max(np.abs(drho + div))

    r_coarse = residual(40)
    r_fine = residual(20)
    assert 3.0 < r_coarse / r_fine < 5.0
    assert r_fine < 1e-3


def test_config_validation():
    with pytest.raises(ValueError):
        PropagatorConfig(eps=0.0, dt=1e-3, t_final=1.0)
    with pytest.raises(ValueError):
        PropagatorConfig(eps=0.5, dt=0.0, t_final=1.0)
    with pytest.raises(ValueError):
        PropagatorConfig(eps=0.5, dt=1e-3, t_final=-1.0)
    with pytest.raises(ValueError):
        PropagatorConfig(eps=0.5, dt=1e-3, t_final=1.0, snapshot_stride=0)
