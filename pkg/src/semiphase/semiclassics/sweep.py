"""Dyadic eps-sweep driver: synthesize each family at a ladder of scales,
optionally propagate, and measure distances to the tabulated limit measures,
second-moment gaps and pairing-functional values.

Grids scale with eps so that the synthesis resolution rules hold; fitted
log-log slopes are reported as observations, not assertions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..grid import make_grid
from ..hydrodynamics import kinetic_split
from ..phasespace import (
    PairFunction,
    bohmian_measure,
    husimi,
    measure_distance,
    moments,
    pair_functional,
    wigner_transform,
)
from ..potentials import Free, Potential
from ..schrodinger import PropagatorConfig, propagate
from .families import (
    CaseStudyFamily,
    CoherentState,
    Concentrating,
    HarmonicEigenstate,
    ModulatedPlaneWave,
    PeriodicOscillatory,
    POINTS_PER_WAVELENGTH,
    ResolutionError,
    TwoPhaseWKB,
    WKBSingle,
    min_feature_length,
    synthesize,
)
from .limits import limit_bohmian, limit_wigner
from .wkb import hj_characteristics, wkb_wavefunction

OBSERVABLES = (
    "d_beta_bohmian",
    "d_beta_wigner",
    "d_husimi_wigner",
    "d_husimi_bohmian",
    "moment_gap",
    "osmotic",
    "wkb_l2_error",
)

_NEED_WIGNER = {"d_husimi_wigner", "d_husimi_bohmian", "moment_gap"}


def momentum_extent(family: CaseStudyFamily, eps: float) -> float:
    """Upper bound on the eps-scaled momentum content of the synthesized state."""
    if isinstance(family, ModulatedPlaneWave):
        return abs(family.momentum) + 8.0 * eps / family.profile.width
    if isinstance(family, PeriodicOscillatory):
        return family.max_harmonic + 8.0 * eps / family.profile.width
    if isinstance(family, Concentrating):
        return 8.0 / family.profile.width + abs(family.chirp) * family.profile.support_radius
    if isinstance(family, CoherentState):
        return abs(family.momentum) + 8.0 * math.sqrt(eps) / family.profile.width
    if isinstance(family, HarmonicEigenstate):
        return 1.25 * math.sqrt(2.0 * family.energy)
    if isinstance(family, TwoPhaseWKB):
        return max(abs(family.slope1), abs(family.slope2)) + 8.0 * eps / family.amplitude.width
    if isinstance(family, WKBSingle):
        r = family.amplitude.support_radius
        probe = family.center + np.linspace(-r, r, 2049)
        return float(np.max(np.abs(family.phase.derivative(probe)))) + 8.0 * eps / family.amplitude.width
    raise TypeError(f"unknown family {type(family).__name__}")


def choose_grid_size(
    family: CaseStudyFamily,
    eps: float,
    x_min: float,
    x_max: float,
    grid_cap: int = 4096,
    need_momentum_grid: bool = False,
    momentum_safety: float = 0.8,
) -> int:
    """Smallest power-of-two n satisfying the resolution rules at this eps."""
    length = x_max - x_min
    n = 256
    while n <= grid_cap:
        dx = length / n
        feature = min_feature_length(family, eps, make_grid(x_min, x_max, n))
        ok = dx <= feature / POINTS_PER_WAVELENGTH
        if ok and need_momentum_grid:
            p_max = math.pi * eps / (2.0 * dx)
            ok = momentum_safety * p_max >= momentum_extent(family, eps)
        if ok:
            return n
        n *= 2
    raise ResolutionError(
        f"{type(family).__name__} at eps={eps:.6g} is not resolvable on "
        f"[{x_min}, {x_max}] within the {grid_cap}-point budget"
    )


@dataclass(frozen=True)
class SweepConfig:
    family: CaseStudyFamily
    x_min: float
    x_max: float
    epsilons: tuple
    observables: tuple = ("d_beta_bohmian", "d_beta_wigner")
    potential: Potential = field(default_factory=Free)
    propagate_time: float | None = None
    dt: float = 1e-3
    snapshot_stride: int = 10
    grid_cap: int = 4096
    pair_functions: tuple = ()          # (name, PairFunction) pairs

    def __post_init__(self) -> None:
        unknown = set(self.observables) - set(OBSERVABLES)
        if unknown:
            raise ValueError(f"unknown observables {sorted(unknown)}; choices: {OBSERVABLES}")
        if "wkb_l2_error" in self.observables:
            if self.propagate_time is None or not isinstance(self.family, WKBSingle):
                raise ValueError("wkb_l2_error needs a WKBSingle family and a propagation time")


@dataclass(frozen=True)
class SweepRow:
    eps: float
    n: int
    values: dict


@dataclass(frozen=True)
class SweepResult:
    rows: list
    slopes: dict

    def series(self, name: str) -> np.ndarray:
        return np.array([row.values[name] for row in self.rows])


def _limit_kwargs(cfg: SweepConfig) -> dict:
    if isinstance(cfg.family, WKBSingle) and cfg.propagate_time:
        return {"t": cfg.propagate_time, "potential": cfg.potential}
    return {}


def _sweep_one(args: tuple) -> SweepRow:
    cfg, eps = args
    return _sweep_point(cfg, eps)


def epsilon_sweep(cfg: SweepConfig, workers: int = 1) -> SweepResult:
    """Run the sweep; one row per eps in the given order, slopes fitted last.

    Sweep points are independent; with ``workers`` > 1 they run in separate
    processes and are reduced deterministically in eps order.
    """
    if workers > 1 and len(cfg.epsilons) > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(
            max_workers=min(workers, len(cfg.epsilons))
        ) as pool:
            rows = list(pool.map(_sweep_one, [(cfg, e) for e in cfg.epsilons]))
    else:
        rows = [_sweep_point(cfg, eps) for eps in cfg.epsilons]

    slopes: dict = {}
    eps_arr = np.array([row.eps for row in rows], dtype=float)
    if len(rows) >= 2:
        for name in rows[0].values:
            series = np.array([row.values[name] for row in rows], dtype=float)
            if np.all(series > 0):
                slopes[name] = float(np.polyfit(np.log(eps_arr), np.log(series), 1)[0])
    return SweepResult(rows=rows, slopes=slopes)


def _sweep_point(cfg: SweepConfig, eps: float) -> SweepRow:
    need_wigner = bool(_NEED_WIGNER & set(cfg.observables))
    n = choose_grid_size(
        cfg.family, eps, cfg.x_min, cfg.x_max, cfg.grid_cap, need_momentum_grid=need_wigner
    )
    grid = make_grid(cfg.x_min, cfg.x_max, n)
    psi = synthesize(cfg.family, eps, grid)
    if cfg.propagate_time:
        pcfg = PropagatorConfig(
            eps=eps, dt=cfg.dt, t_final=cfg.propagate_time, snapshot_stride=cfg.snapshot_stride
        )
        record = propagate(psi, cfg.potential, pcfg)
        psi = record.wave_function(len(record) - 1)

    values: dict = {}
    beta = bohmian_measure(psi)
    lim_b = limit_bohmian(cfg.family, x_grid=grid, **_limit_kwargs(cfg))
    lim_w = limit_wigner(cfg.family, x_grid=grid, **_limit_kwargs(cfg))

    wig = husimi_measure = None
    if need_wigner:
        wig = wigner_transform(psi)
        husimi_measure = husimi(wig)

    for name in cfg.observables:
        if name == "d_beta_bohmian":
            values[name] = measure_distance(beta, lim_b)
        elif name == "d_beta_wigner":
            values[name] = measure_distance(beta, lim_w)
        elif name == "d_husimi_wigner":
            values[name] = measure_distance(husimi_measure, lim_w)
        elif name == "d_husimi_bohmian":
            values[name] = measure_distance(husimi_measure, lim_b)
        elif name == "moment_gap":
            values[name] = moments(wig).second_moment - moments(beta, grid).second_moment
        elif name == "osmotic":
            values[name] = kinetic_split(psi).osmotic_part
        elif name == "wkb_l2_error":
            state = hj_characteristics(
                cfg.family.phase,
                cfg.family.amplitude,
                cfg.potential,
                cfg.propagate_time,
                amplitude_center=cfg.family.center,
            )
            psi_wkb = wkb_wavefunction(state, eps, grid)
            values[name] = grid.l2_norm(psi_wkb.values - psi.values)
    for pname, pf in cfg.pair_functions:
        values[f"pair:{pname}"] = pair_functional(psi, pf)
    return SweepRow(eps=eps, n=n, values=values)
