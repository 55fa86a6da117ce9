"""Command-line runner: scenario ingestion, pipeline orchestration and
deterministic persistence of artifacts into a run directory.

Scenarios are JSON documents validated against the in-repo schema
(schemas/scenario-v1.json) plus semantic rules (power-of-two grids,
resolution margins) before any computation starts.  All tabular outputs are
CSV with 17 significant digits; complex fields are raw little-endian
complex128 with a JSON sidecar.  The manifest is written last: a run
directory without run_manifest.json is an incomplete run.

Exit codes: 0 success, 1 runtime failure (partial outputs retained, no
manifest), 2 invalid input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .bohmian import (
    STATUS_NAMES,
    equivariance_error,
    integrate_trajectories,
    sample_initial,
)
from .grid import UniformGrid, WaveFunction, make_grid
from .hydrodynamics import compute_densities
from .phasespace import PhaseSpaceMeasure, bohmian_measure, husimi, measure_distance, wigner_transform
from .potentials import Potential, PotentialError, potential_from_dict
from .schrodinger import EvolutionRecord, PropagatorConfig, propagate
from .semiclassics import (
    CellPhase,
    CoherentState,
    Concentrating,
    HarmonicEigenstate,
    ModulatedPlaneWave,
    PeriodicOscillatory,
    PhaseSpec,
    Profile,
    ResolutionError,
    SweepConfig,
    TwoPhaseWKB,
    WKBSingle,
    caustic_time,
    choose_grid_size,
    epsilon_sweep,
    hj_characteristics,
    limit_bohmian,
    limit_wigner,
    min_feature_length,
    synthesize,
    wkb_wavefunction,
)
from .semiclassics.families import POINTS_PER_WAVELENGTH

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INVALID = 2

MANIFEST_NAME = "run_manifest.json"

FAMILY_NAMES = (
    "modulated_plane_wave",
    "periodic_oscillatory",
    "concentrating",
    "coherent_state",
    "harmonic_eigenstate",
    "two_phase_wkb",
    "wkb_single",
)


class ScenarioError(ValueError):
    """Invalid scenario input; the message names the offending field or rule."""


# ----------------------------------------------------------------------
# scenario construction
# ----------------------------------------------------------------------

def load_schema() -> dict:
    with resources.files("semiphase.schemas").joinpath("scenario-v1.json").open("rb") as fh:
        return json.load(fh)


def _profile_from(spec: dict | None, field: str) -> Profile:
    spec = spec or {}
    try:
        return Profile(kind=spec.get("kind", "gaussian"), width=float(spec.get("width", 1.0)))
    except ValueError as exc:
        raise ScenarioError(f"{field}: {exc}") from exc


def _phase_from(spec: dict | None, field: str) -> PhaseSpec:
    spec = spec or {}
    kind = spec.get("kind", "quadratic")
    try:
        return PhaseSpec(
            kind=kind,
            slope=float(spec.get("slope", 0.0)),
            curvature=float(spec.get("curvature", -1.0)),
            strength=float(spec.get("strength", 1.0)),
            wavevector=float(spec.get("wavevector", 1.0)),
        )
    except ValueError as exc:
        raise ScenarioError(f"{field}: {exc}") from exc


def family_from_dict(spec: dict):
    """Build a case-study family from its scenario serialization."""
    name = spec.get("family")
    params = spec.get("params", {}) or {}
    try:
        if name == "modulated_plane_wave":
            return ModulatedPlaneWave(
                profile=_profile_from(params.get("profile"), "initial_state.params.profile"),
                center=float(params.get("center", 0.0)),
                momentum=float(params.get("momentum", 1.0)),
            )
        if name == "periodic_oscillatory":
            harmonics = params.get("harmonics")
            phase = params.get("phase")
            cell = None
            parsed = None
            if harmonics is not None:
                parsed = {}
                for key, val in harmonics.items():
                    coeff = complex(val[0], val[1]) if isinstance(val, (list, tuple)) else complex(val)
                    parsed[int(key)] = coeff
            if phase is not None:
                cell = CellPhase(
                    strength=float(phase.get("strength", 1.0)),
                    harmonic=int(phase.get("harmonic", 1)),
                )
            return PeriodicOscillatory(
                profile=_profile_from(params.get("profile"), "initial_state.params.profile"),
                center=float(params.get("center", 0.0)),
                harmonics=parsed,
                phase=cell,
            )
        if name == "concentrating":
            return Concentrating(
                profile=_profile_from(params.get("profile"), "initial_state.params.profile"),
                center=float(params.get("center", 0.0)),
                chirp=float(params.get("chirp", 0.0)),
            )
        if name == "coherent_state":
            return CoherentState(
                profile=_profile_from(params.get("profile"), "initial_state.params.profile"),
                center=float(params.get("center", 0.0)),
                momentum=float(params.get("momentum", 0.0)),
            )
        if name == "harmonic_eigenstate":
            return HarmonicEigenstate(energy=float(params.get("energy", 1.0)))
        if name == "two_phase_wkb":
            return TwoPhaseWKB(
                amplitude=_profile_from(params.get("amplitude"), "initial_state.params.amplitude"),
                center=float(params.get("center", 0.0)),
                ratio=float(params.get("ratio", 0.5)),
                slope1=float(params.get("slope1", 1.0)),
                slope2=float(params.get("slope2", -1.0)),
            )
        if name == "wkb_single":
            return WKBSingle(
                amplitude=_profile_from(params.get("amplitude"), "initial_state.params.amplitude"),
                center=float(params.get("center", 0.0)),
                phase=_phase_from(params.get("phase"), "initial_state.params.phase"),
            )
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"initial_state.params: {exc}") from exc
    raise ScenarioError(f"initial_state.family: unknown family {name!r}")


@dataclass
class Scenario:
    raw: dict
    name: str
    grid: UniformGrid
    potential: Potential
    family: object
    epsilons: tuple
    is_sweep: bool
    propagation: dict | None
    ensemble: dict | None
    artifacts: list
    compare_spec: dict | None
    sweep_spec: dict
    wkb_spec: dict


def build_scenario(raw: dict, seed_override: int | None = None) -> Scenario:
    """Validate a raw scenario document and construct all run objects.

    Fail-fast: every constituent is checked before any computation starts,
    and errors name the offending field or rule.
    """
    try:
        jsonschema.validate(raw, load_schema())
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"{path}: {exc.message}") from exc

    gspec = raw["grid"]
    n = int(gspec["n"])
    if n < 16 or n & (n - 1):
        raise ScenarioError("grid.n: must be a power of two >= 16")
    if not gspec["x_max"] > gspec["x_min"]:
        raise ScenarioError("grid.x_max: must exceed grid.x_min")
    grid = make_grid(gspec["x_min"], gspec["x_max"], n)

    try:
        potential = potential_from_dict(raw["potential"], grid)
    except PotentialError as exc:
        raise ScenarioError(f"potential: {exc}") from exc

    family = family_from_dict(raw["initial_state"])

    has_single = "epsilon" in raw
    has_list = "epsilon_list" in raw
    if has_single == has_list:
        raise ScenarioError("epsilon: specify exactly one of epsilon or epsilon_list")
    epsilons = tuple(raw["epsilon_list"]) if has_list else (raw["epsilon"],)

    artifacts = list(raw["artifacts"])
    if ("sweep" in artifacts) != has_list:
        raise ScenarioError("artifacts: the sweep artifact requires epsilon_list (and vice versa)")
    single_state = [a for a in artifacts if a != "sweep"]
    if has_list and single_state:
        raise ScenarioError(
            f"artifacts: {single_state[0]} works on a single state; use epsilon, not epsilon_list"
        )
    if "trajectories" in artifacts and "ensemble" not in raw:
        raise ScenarioError("ensemble: required by the trajectories artifact")
    if "trajectories" in artifacts and "propagation" not in raw:
        raise ScenarioError("propagation: required by the trajectories artifact")
    if "wkb" in artifacts and raw["initial_state"]["family"] != "wkb_single":
        raise ScenarioError("artifacts: the wkb artifact requires the wkb_single family")
    if "compare" in artifacts and "compare" not in raw:
        raise ScenarioError("compare: configuration block required by the compare artifact")
    if "compare" in artifacts:
        subject = raw.get("compare", {}).get("subject", "bohmian-measure")
        needed = "wigner" if subject == "husimi" else "bohmian-measure"
        if needed not in artifacts:
            raise ScenarioError(f"compare.subject: requires the {needed} artifact")

    ensemble = dict(raw.get("ensemble", {})) or None
    if ensemble is not None and seed_override is not None:
        ensemble["seed"] = int(seed_override)

    # resolution pre-flight for every eps (the sweep re-derives its own grids,
    # bounded by the scenario grid size)
    sweep_obs = tuple(raw.get("sweep", {}).get("observables", ()))
    sweep_needs_wigner = any(
        name in ("d_husimi_wigner", "d_husimi_bohmian", "moment_gap") for name in sweep_obs
    )
    for eps in epsilons:
        if has_list:
            try:
                choose_grid_size(family, eps, grid.x_min, grid.x_max, grid_cap=grid.n,
                                 need_momentum_grid=sweep_needs_wigner)
            except ResolutionError as exc:
                raise ScenarioError(f"epsilon_list: {exc}") from exc
        else:
            feature = min_feature_length(family, eps, grid)
            if grid.dx > feature / POINTS_PER_WAVELENGTH:
                raise ScenarioError(
                    f"epsilon: grid resolves features of length {grid.dx * POINTS_PER_WAVELENGTH:.3e} "
                    f"but eps={eps:g} produces features of length {feature:.3e} "
                    f"(rule: at least {POINTS_PER_WAVELENGTH} points per feature)"
                )
            if "wigner" in artifacts:
                from .semiclassics.sweep import momentum_extent

                p_max = np.pi * eps / (2.0 * grid.dx)
                needed = momentum_extent(family, eps)
                if needed > 0.8 * p_max:
                    raise ScenarioError(
                        f"epsilon: momentum content ~{needed:.3g} exceeds 80% of the "
                        f"resolvable range p_max={p_max:.3g} "
                        "(rule: momenta within 0.8 * pi * eps / (2 dx))"
                    )

    return Scenario(
        raw=raw,
        name=raw["name"],
        grid=grid,
        potential=potential,
        family=family,
        epsilons=epsilons,
        is_sweep=has_list,
        propagation=raw.get("propagation"),
        ensemble=ensemble,
        artifacts=artifacts,
        compare_spec=raw.get("compare"),
        sweep_spec=raw.get("sweep", {}),
        wkb_spec=raw.get("wkb", {}),
    )


# ----------------------------------------------------------------------
# deterministic writers
# ----------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path: Path, header: list, columns: list) -> None:
    """CSV with '.' decimals and 17 significant digits, newline-terminated."""
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = zip(*columns)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_complex_field(path: Path, values: np.ndarray, sidecar: dict) -> None:
    """Raw little-endian complex128 samples plus a JSON sidecar."""
    path.parent.mkdir(parents=True, exist_ok=True)
    np.asarray(values, dtype=complex).astype("<c16").tofile(path)
    meta = dict(sidecar)
    meta.update({"dtype": "<c16", "layout": "1d samples, x-major"})
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def write_measure(path: Path, measure: PhaseSpaceMeasure, extra: dict | None = None) -> None:
    write_csv(path, ["x", "p", "weight"], [measure.x, measure.p, measure.weights])
    meta = {
        "provenance": measure.provenance,
        "mass": measure.mass,
        "defect": measure.defect,
        "particles": int(measure.x.size),
    }
    meta.update(extra or {})
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_measure(path: Path) -> PhaseSpaceMeasure:
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    meta_path = path.with_suffix(".json")
    provenance = "ensemble"
    if meta_path.exists():
        provenance = json.loads(meta_path.read_text()).get("provenance", "ensemble")
    return PhaseSpaceMeasure(
        x=data["x"], p=data["p"], weights=data["weight"], provenance=provenance
    )


def file_digest(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


# ----------------------------------------------------------------------
# run pipeline
# ----------------------------------------------------------------------

def _scenario_limit(scn: Scenario, which: str) -> PhaseSpaceMeasure:
    """Tabulate a limit measure consistent with the scenario's evolution time."""
    kwargs = {}
    if isinstance(scn.family, WKBSingle) and scn.propagation:
        kwargs = {"t": float(scn.propagation["t_final"]), "potential": scn.potential}
    limit_fn = limit_bohmian if which == "limit-bohmian" else limit_wigner
    return limit_fn(scn.family, x_grid=scn.grid, **kwargs)


def _final_state(scn: Scenario, diagnostics: dict) -> tuple[WaveFunction, EvolutionRecord | None]:
    eps = scn.epsilons[0]
    psi0 = synthesize(scn.family, eps, scn.grid)
    if not scn.propagation:
        return psi0, None
    pcfg = PropagatorConfig(
        eps=eps,
        dt=float(scn.propagation["dt"]),
        t_final=float(scn.propagation["t_final"]),
        snapshot_stride=int(scn.propagation.get("snapshot_stride", 1)),
        mass_drift_tol=float(scn.propagation.get("mass_drift_tol", 1e-12)),
        boundary_tolerance=float(scn.propagation.get("boundary_tolerance", 1e-8)),
    )
    record = propagate(psi0, scn.potential, pcfg)
    diagnostics["mass_drift"] = record.mass_drift
    diagnostics["energy_drift"] = record.energy_drift
    return record.wave_function(len(record) - 1), record


def run_scenario(scn: Scenario, out_dir: Path, threads: int = 1, quiet: bool = False) -> dict:
    """Execute the requested pipeline; returns the manifest dictionary."""
    t_start = time.perf_counter()
    out_dir.mkdir(parents=True, exist_ok=True)
    if (out_dir / MANIFEST_NAME).exists():
        raise RuntimeError(f"{out_dir} already contains a completed run (manifest present)")

    diagnostics: dict = {}
    timings: dict = {}
    produced: list[Path] = []

    def log(msg: str) -> None:
        if not quiet:
            print(msg, file=sys.stderr)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")

        record = None
        psi = None
        if not scn.is_sweep:
            t0 = time.perf_counter()
            psi, record = _final_state(scn, diagnostics)
            timings["state_s"] = time.perf_counter() - t0

        measures: dict[str, PhaseSpaceMeasure] = {}

        for artifact in scn.artifacts:
            t0 = time.perf_counter()
            log(f"[{scn.name}] artifact: {artifact}")
            if artifact == "densities":
                snaps = record.states if record is not None else psi.values[None, :]
                times_list = record.times if record is not None else np.array([0.0])
                for i in range(snaps.shape[0]):
                    wf = WaveFunction(scn.grid, snaps[i], scn.epsilons[0])
                    fields = compute_densities(wf)
                    path = out_dir / "densities" / f"densities_{i:05d}.csv"
                    write_csv(
                        path,
                        ["x", "rho", "current", "velocity", "mask"],
                        [scn.grid.x, fields.rho, fields.current, fields.velocity,
                         fields.mask.astype(int)],
                    )
                    produced.append(path)
                    bpath = out_dir / "snapshots" / f"snapshot_{i:05d}.c128"
                    write_complex_field(
                        bpath,
                        snaps[i],
                        {"time": float(times_list[i]), "eps": scn.epsilons[0],
                         "x_min": scn.grid.x_min, "x_max": scn.grid.x_max, "n": scn.grid.n},
                    )
                    produced.extend([bpath, bpath.with_suffix(".json")])
                idx = out_dir / "snapshots" / "snapshots.json"
                idx.parent.mkdir(parents=True, exist_ok=True)
                idx.write_text(json.dumps({
                    "eps": scn.epsilons[0],
                    "grid": {"x_min": scn.grid.x_min, "x_max": scn.grid.x_max, "n": scn.grid.n},
                    "times": [float(t) for t in times_list],
                    "count": int(snaps.shape[0]),
                }, indent=2, sort_keys=True) + "\n")
                produced.append(idx)
                diagnostics["node_mask_mass"] = compute_densities(psi).mask_mass

            elif artifact == "trajectories":
                ens_cfg = scn.ensemble
                rho0 = compute_densities(record.wave_function(0)).rho
                pos0, wts = sample_initial(scn.grid, rho0, int(ens_cfg["n_particles"]),
                                           int(ens_cfg["seed"]))
                ensemble = integrate_trajectories(
                    record, pos0, wts,
                    substeps_per_snapshot=int(ens_cfg.get("substeps_per_snapshot", 1)),
                    interpolation=ens_cfg.get("interpolation", "cubic"),
                    seed=int(ens_cfg["seed"]),
                )
                diagnostics["stalled_fraction"] = ensemble.stalled_fraction
                diagnostics["order_violations"] = ensemble.order_violations
                rho_final = compute_densities(record.wave_function(len(record) - 1)).rho
                diagnostics["equivariance_w1_initial"] = equivariance_error(
                    ensemble.positions[0], wts, scn.grid, rho0)
                diagnostics["equivariance_w1_final"] = equivariance_error(
                    ensemble.positions[-1], wts, scn.grid, rho_final)

                n_t, n_p = ensemble.positions.shape
                t_stride = int(ens_cfg.get("store_stride", max(1, n_t // 200)))
                p_keep = min(n_p, int(ens_cfg.get("store_particles", 256)))
                t_idx = np.arange(0, n_t, t_stride)
                if t_idx[-1] != n_t - 1:
                    t_idx = np.append(t_idx, n_t - 1)
                p_idx = np.linspace(0, n_p - 1, p_keep).astype(int)
                pid = np.repeat(p_idx, t_idx.size)
                tt = np.tile(ensemble.times[t_idx], p_keep)
                xx = ensemble.positions[np.ix_(t_idx, p_idx)].T.ravel()
                pp = ensemble.momenta[np.ix_(t_idx, p_idx)].T.ravel()
                st = np.repeat(ensemble.status[p_idx], t_idx.size)
                path = out_dir / "trajectories.csv"
                write_csv(path, ["particle", "t", "x", "p", "status"], [pid, tt, xx, pp, st])
                produced.append(path)
                meta = out_dir / "trajectories.json"
                meta.write_text(json.dumps({
                    "n_particles": n_p,
                    "stored_particles": int(p_keep),
                    "stored_times": int(t_idx.size),
                    "status_codes": {str(k): v for k, v in STATUS_NAMES.items()},
                    "seed": int(ens_cfg["seed"]),
                }, indent=2, sort_keys=True) + "\n")
                produced.append(meta)

            elif artifact == "bohmian-measure":
                beta = bohmian_measure(psi)
                measures["bohmian-measure"] = beta
                path = out_dir / "measures" / "bohmian_measure.csv"
                write_measure(path, beta, {"eps": scn.epsilons[0]})
                produced.extend([path, path.with_suffix(".json")])
                diagnostics["bohmian_defect"] = beta.defect

            elif artifact == "wigner":
                wig = wigner_transform(psi)
                bpath = out_dir / "wigner" / "wigner.f64"
                bpath.parent.mkdir(parents=True, exist_ok=True)
                wig.values.astype("<f8").tofile(bpath)
                meta = out_dir / "wigner" / "wigner.json"
                meta.write_text(json.dumps({
                    "dtype": "<f8",
                    "layout": "C row-major (x rows, p columns)",
                    "n_x": int(scn.grid.n),
                    "n_p": int(wig.p.size),
                    "x_min": scn.grid.x_min,
                    "dx": scn.grid.dx,
                    "p_min": float(wig.p[0]),
                    "dp": wig.dp,
                    "eps": scn.epsilons[0],
                    "mass": wig.mass,
                }, indent=2, sort_keys=True) + "\n")
                produced.extend([bpath, meta])
                hus = husimi(wig)
                measures["husimi"] = hus
                hpath = out_dir / "measures" / "husimi_measure.csv"
                write_measure(hpath, hus, {"eps": scn.epsilons[0]})
                produced.extend([hpath, hpath.with_suffix(".json")])

            elif artifact == "sweep":
                swp = scn.sweep_spec
                observables = tuple(swp.get("observables", ("d_beta_bohmian", "d_beta_wigner")))
                cfg = SweepConfig(
                    family=scn.family,
                    x_min=scn.grid.x_min,
                    x_max=scn.grid.x_max,
                    epsilons=scn.epsilons,
                    observables=observables,
                    potential=scn.potential,
                    propagate_time=swp.get("propagate_time"),
                    dt=float(scn.propagation["dt"]) if scn.propagation else 1e-3,
                    grid_cap=scn.grid.n,
                )
                result = epsilon_sweep(cfg, workers=threads)
                path = out_dir / "sweep.csv"
                names = list(result.rows[0].values)
                write_csv(
                    path,
                    ["epsilon", "n"] + names,
                    [[r.eps for r in result.rows], [r.n for r in result.rows]]
                    + [[r.values[k] for r in result.rows] for k in names],
                )
                produced.append(path)
                spath = out_dir / "sweep_slopes.csv"
                write_csv(spath, ["observable", "slope"],
                          [list(result.slopes), [result.slopes[k] for k in result.slopes]])
                produced.append(spath)
                # persist measures at the finest scale for phase-space figures,
                # evolved to the same time as the table rows
                eps_fine = min(scn.epsilons)
                n_fine = choose_grid_size(scn.family, eps_fine, scn.grid.x_min, scn.grid.x_max,
                                          grid_cap=scn.grid.n, need_momentum_grid=True)
                g_fine = make_grid(scn.grid.x_min, scn.grid.x_max, n_fine)
                psi_fine = synthesize(scn.family, eps_fine, g_fine)
                limit_kwargs = {}
                if cfg.propagate_time:
                    pcfg = PropagatorConfig(eps=eps_fine, dt=cfg.dt, t_final=cfg.propagate_time,
                                            snapshot_stride=cfg.snapshot_stride)
                    fine_rec = propagate(psi_fine, scn.potential, pcfg)
                    psi_fine = fine_rec.wave_function(len(fine_rec) - 1)
                    if isinstance(scn.family, WKBSingle):
                        limit_kwargs = {"t": cfg.propagate_time, "potential": scn.potential}
                for tag, m in (
                    ("beta", bohmian_measure(psi_fine)),
                    ("limit_bohmian", limit_bohmian(scn.family, x_grid=g_fine, **limit_kwargs)),
                    ("limit_wigner", limit_wigner(scn.family, x_grid=g_fine, **limit_kwargs)),
                ):
                    mpath = out_dir / "measures" / f"{tag}.csv"
                    write_measure(mpath, m, {"eps": eps_fine})
                    produced.extend([mpath, mpath.with_suffix(".json")])

            elif artifact == "wkb":
                t_wkb = float(scn.wkb_spec.get("time", 0.0))
                horizon = float(scn.wkb_spec.get("caustic_horizon", 4.0))
                n_seeds = int(scn.wkb_spec.get("seeds", 2048))
                fam = scn.family
                t_star = caustic_time(fam.phase, scn.potential, horizon,
                                      x_span=(scn.grid.x_min, scn.grid.x_max))
                state = hj_characteristics(fam.phase, fam.amplitude, scn.potential, t_wkb,
                                           n_seeds=n_seeds, amplitude_center=fam.center)
                path = out_dir / "wkb" / "characteristics.csv"
                write_csv(path, ["x0", "x", "p", "jacobian", "amplitude", "action"],
                          [state.seeds, state.positions, state.momenta, state.jacobian,
                           state.amplitude, state.action])
                produced.append(path)
                summary = {
                    "time": t_wkb,
                    "caustic_time": t_star,
                    "caustic_reached": state.caustic,
                    "eps": scn.epsilons[0],
                }
                if not state.caustic:
                    psi_wkb = wkb_wavefunction(state, scn.epsilons[0], scn.grid)
                    bpath = out_dir / "wkb" / "wkb_wavefunction.c128"
                    write_complex_field(bpath, psi_wkb.values, {
                        "time": t_wkb, "eps": scn.epsilons[0],
                        "x_min": scn.grid.x_min, "x_max": scn.grid.x_max, "n": scn.grid.n,
                    })
                    produced.extend([bpath, bpath.with_suffix(".json")])
                    solver_time = float(scn.propagation["t_final"]) if scn.propagation else 0.0
                    if psi is not None and abs(solver_time - t_wkb) < 1e-12:
                        summary["l2_error_vs_solver"] = scn.grid.l2_norm(
                            psi_wkb.values - psi.values)
                spath = out_dir / "wkb" / "summary.json"
                spath.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
                produced.append(spath)

            elif artifact == "compare":
                spec = scn.compare_spec
                subject_name = spec.get("subject", "bohmian-measure")
                subject = measures[subject_name if subject_name != "husimi" else "husimi"]
                against = spec["against"]
                reference = _scenario_limit(scn, against)
                dist = measure_distance(subject, reference)
                threshold = spec.get("threshold")
                verdict = "pass" if threshold is None or dist <= threshold else "fail"
                path = out_dir / "compare_report.csv"
                write_csv(path, ["subject", "reference", "distance", "threshold", "verdict"],
                          [[subject_name], [against], [dist],
                           [threshold if threshold is not None else float("nan")], [verdict]])
                produced.append(path)
                diagnostics[f"compare_{subject_name}_vs_{against}"] = dist

            timings[f"{artifact}_s"] = time.perf_counter() - t0

    manifest = {
        "tool": "semiphase",
        "version": __version__,
        "scenario": scn.raw,
        "timings": {**timings, "total_s": time.perf_counter() - t_start},
        "diagnostics": diagnostics,
        "warnings": [str(w.message) for w in caught],
        "files": sorted(
            (
                {
                    "path": str(p.relative_to(out_dir)),
                    "sha256": file_digest(p),
                    "bytes": p.stat().st_size,
                }
                for p in dict.fromkeys(produced)
            ),
            key=lambda item: item["path"],
        ),
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def _load_scenario_file(path: str, seed: int | None) -> Scenario:
    p = Path(path)
    if not p.exists():
        raise ScenarioError(f"scenario file {path} does not exist")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file is not valid JSON: {exc}") from exc
    return build_scenario(raw, seed_override=seed)


def cmd_run(args) -> int:
    try:
        scn = _load_scenario_file(args.scenario, args.seed)
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out_dir = Path(args.out) if args.out else Path(scn.raw.get("output_dir", f"runs/{scn.name}"))
    try:
        manifest = run_scenario(scn, out_dir, threads=args.threads, quiet=args.quiet)
    except Exception as exc:  # runtime failure: keep partial outputs, no manifest
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if not args.quiet:
        print(f"run complete: {out_dir} ({len(manifest['files'])} files)")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        scn = _load_scenario_file(args.scenario, args.seed)
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    grid = scn.grid
    print("ok")
    print(f"  grid: n={grid.n} dx={grid.dx:.6g} length={grid.length:.6g}")
    for eps in scn.epsilons:
        feature = min_feature_length(scn.family, eps, grid)
        dp = np.pi * eps / grid.length
        p_max = np.pi * eps / (2.0 * grid.dx)
        margin = feature / POINTS_PER_WAVELENGTH / grid.dx
        print(
            f"  eps={eps:.6g}: dp={dp:.6g} p_max={p_max:.6g} "
            f"resolution margin={margin:.3f}x"
        )
    return EXIT_OK


def cmd_compare(args) -> int:
    run_a = Path(args.run_a)
    if not (run_a / MANIFEST_NAME).exists():
        print(f"{run_a} is not a completed run (no manifest)", file=sys.stderr)
        return EXIT_INVALID
    manifest = json.loads((run_a / MANIFEST_NAME).read_text())
    names = ("bohmian_measure", "husimi_measure", "beta")
    present = {n: run_a / "measures" / f"{n}.csv" for n in names
               if (run_a / "measures" / f"{n}.csv").exists()}
    if not present:
        print(f"{run_a} contains no measure artifacts", file=sys.stderr)
        return EXIT_INVALID

    references: dict[str, PhaseSpaceMeasure] = {}
    if args.run_b:
        run_b = Path(args.run_b)
        if not (run_b / MANIFEST_NAME).exists():
            print(f"{run_b} is not a completed run (no manifest)", file=sys.stderr)
            return EXIT_INVALID
        for name, path in present.items():
            other = run_b / "measures" / f"{name}.csv"
            if other.exists():
                references[name] = read_measure(other)
    else:
        scn = build_scenario(manifest["scenario"])
        ref = _scenario_limit(scn, args.against)
        for name in present:
            references[name] = ref

    if not references:
        print("no comparable measures between the two runs", file=sys.stderr)
        return EXIT_INVALID

    all_pass = True
    print("measure,reference,distance,threshold,verdict")
    for name, path in present.items():
        if name not in references:
            continue
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            dist = measure_distance(read_measure(path), references[name])
        note = ";".join(str(w.message) for w in caught)
        threshold = args.threshold
        verdict = "pass" if threshold is None or dist <= threshold else "fail"
        all_pass &= verdict == "pass"
        ref_name = args.run_b if args.run_b else args.against
        line = f"{name},{ref_name},{dist:.6g},{threshold if threshold is not None else ''},{verdict}"
        if note:
            line += f"  # {note}"
        print(line)
    return EXIT_OK if all_pass else EXIT_RUNTIME


def cmd_list_families(_args) -> int:
    descriptions = {
        "modulated_plane_wave": "envelope times a single carrier exp(i p0 x / eps)",
        "periodic_oscillatory": "envelope times a periodic profile g(x/eps); harmonics or phase form",
        "concentrating": "profile concentrating at one point on scale eps (optional chirp)",
        "coherent_state": "minimal packet: width sqrt(eps), carrier momentum p0",
        "harmonic_eigenstate": "oscillator eigenstates with eps_n (n + 1/2) -> energy",
        "two_phase_wkb": "superposition of two carrier slopes under one envelope",
        "wkb_single": "slowly varying amplitude and phase a0 exp(i S0 / eps)",
    }
    for name in FAMILY_NAMES:
        print(f"{name}: {descriptions[name]}")
    return EXIT_OK


def main(argv: list | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="semiphase",
        description="eps-scaled Schrodinger dynamics and phase-space measure comparisons",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario into a run directory")
    p_run.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    p_run.add_argument("--out", default=None, help="run directory (default from scenario)")
    p_run.add_argument("--threads", type=int, default=1, help="parallel sweep workers")
    p_run.add_argument("--seed", type=int, default=None, help="override the ensemble seed")
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="validate a scenario without computing")
    p_val.add_argument("--scenario", required=True)
    p_val.add_argument("--seed", type=int, default=None)
    p_val.set_defaults(func=cmd_validate)

    p_cmp = sub.add_parser("compare", help="compare measures between runs or against a limit")
    p_cmp.add_argument("run_a", help="run directory")
    p_cmp.add_argument("run_b", nargs="?", default=None, help="second run directory")
    p_cmp.add_argument("--against", choices=["limit-bohmian", "limit-wigner"],
                       default="limit-bohmian", help="built-in limit when no second run is given")
    p_cmp.add_argument("--threshold", type=float, default=None)
    p_cmp.set_defaults(func=cmd_compare)

    p_ls = sub.add_parser("list-families", help="list synthesizable state families")
    p_ls.set_defaults(func=cmd_list_families)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
