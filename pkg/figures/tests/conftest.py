"""Fixtures for the figure-script tests.

Run directories are produced by invoking the semiphase CLI as a subprocess:
the figure layer touches the primary component only through its external
interfaces (the CLI and the run-directory file formats).
"""

import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

FIGURES_DIR = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(FIGURES_DIR))


def run_cli(scenario: dict, out_dir: Path) -> Path:
    spath = out_dir.parent / f"{scenario['name']}.json"
    spath.write_text(json.dumps(scenario))
    proc = subprocess.run(
        [sys.executable, "-m", "semiphase.cli", "run", "--scenario", str(spath),
         "--out", str(out_dir), "--quiet"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return out_dir


def tree_digest(root: Path) -> dict:
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out


@pytest.fixture(scope="session")
def sweep_run(tmp_path_factory) -> Path:
    """A small oscillatory-dichotomy sweep (criterion-5 scenario shape)."""
    base = tmp_path_factory.mktemp("sweeprun")
    scenario = {
        "schema_version": 1,
        "name": "fig-dichotomy-sweep",
        "grid": {"x_min": -4.0, "x_max": 4.0, "n": 1024},
        "potential": {"kind": "free"},
        "epsilon_list": [1 / 16, 1 / 32, 1 / 64],
        "initial_state": {
            "family": "periodic_oscillatory",
            "params": {"profile": {"kind": "gaussian", "width": 0.5}, "center": 0.0,
                       "harmonics": {"1": 0.5, "-1": 0.5}},
        },
        "artifacts": ["sweep"],
        "sweep": {"observables": ["d_beta_bohmian", "d_beta_wigner"]},
    }
    return run_cli(scenario, base / "run")


@pytest.fixture(scope="session")
def wkb_run(tmp_path_factory) -> Path:
    """A small caustic-compression run (criterion-8 scenario shape)."""
    base = tmp_path_factory.mktemp("wkbrun")
    scenario = {
        "schema_version": 1,
        "name": "fig-wkb-caustic",
        "grid": {"x_min": -2.0, "x_max": 2.0, "n": 1024},
        "potential": {"kind": "free"},
        "epsilon": 1 / 64,
        "initial_state": {
            "family": "wkb_single",
            "params": {"amplitude": {"kind": "gaussian", "width": 0.25}, "center": 0.0,
                       "phase": {"kind": "quadratic", "curvature": -1.0}},
        },
        "propagation": {"dt": 0.001, "t_final": 0.3, "snapshot_stride": 30},
        "ensemble": {"n_particles": 400, "seed": 7},
        "artifacts": ["densities", "trajectories", "wkb", "bohmian-measure"],
        "wkb": {"time": 0.3, "caustic_horizon": 2.0},
    }
    return run_cli(scenario, base / "run")
