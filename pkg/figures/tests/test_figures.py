import json
from pathlib import Path

import pytest
from PIL import Image

import figlib
import plot_convergence
import plot_density_evolution
import plot_phase_heatmap
import plot_trajectories

from conftest import tree_digest


def embedded_digest(image_path: Path) -> str:
    with Image.open(image_path) as img:
        return img.info.get(figlib.DIGEST_KEY, "")


def manifest_digest(run_dir: Path) -> str:
    import hashlib

    return hashlib.sha256((run_dir / figlib.MANIFEST_NAME).read_bytes()).hexdigest()


# ----------------------------------------------------------------------
# rendering, one figure kind at a time
# ----------------------------------------------------------------------

def test_density_evolution_renders(wkb_run, tmp_path):
    out = tmp_path / "density.png"
    rc = plot_density_evolution.main(["--run", str(wkb_run), "--out", str(out)])
    assert rc == 0
    assert out.exists() and out.stat().st_size > 0
    assert embedded_digest(out) == manifest_digest(wkb_run)


def test_trajectories_renders(wkb_run, tmp_path):
    out = tmp_path / "traj.png"
    rc = plot_trajectories.main(["--run", str(wkb_run), "--out", str(out)])
    assert rc == 0
    assert embedded_digest(out) == manifest_digest(wkb_run)


def test_phase_heatmap_renders_from_sweep(sweep_run, tmp_path):
    out = tmp_path / "phase.png"
    rc = plot_phase_heatmap.main(["--run", str(sweep_run), "--out", str(out)])
    assert rc == 0
    assert embedded_digest(out) == manifest_digest(sweep_run)


def test_phase_heatmap_renders_from_measure_run(wkb_run, tmp_path):
    out = tmp_path / "phase_wkb.png"
    assert plot_phase_heatmap.main(["--run", str(wkb_run), "--out", str(out)]) == 0


def test_convergence_renders(sweep_run, tmp_path):
    out = tmp_path / "conv.png"
    rc = plot_convergence.main(["--run", str(sweep_run), "--out", str(out)])
    assert rc == 0
    assert embedded_digest(out) == manifest_digest(sweep_run)


# ----------------------------------------------------------------------
# contracts
# ----------------------------------------------------------------------

def test_run_directories_are_left_untouched(wkb_run, sweep_run, tmp_path):
    before_w = tree_digest(wkb_run)
    before_s = tree_digest(sweep_run)
    plot_density_evolution.main(["--run", str(wkb_run), "--out", str(tmp_path / "a.png")])
    plot_trajectories.main(["--run", str(wkb_run), "--out", str(tmp_path / "b.png")])
    plot_phase_heatmap.main(["--run", str(sweep_run), "--out", str(tmp_path / "c.png")])
    plot_convergence.main(["--run", str(sweep_run), "--out", str(tmp_path / "d.png")])
    assert tree_digest(wkb_run) == before_w
    assert tree_digest(sweep_run) == before_s


def test_incomplete_run_is_refused(tmp_path, capsys):
    bare = tmp_path / "not_a_run"
    bare.mkdir()
    rc = plot_density_evolution.main(["--run", str(bare), "--out", str(tmp_path / "x.png")])
    assert rc == 2
    assert "refusing" in capsys.readouterr().err
    assert not (tmp_path / "x.png").exists()


def test_missing_artifact_is_a_named_error(sweep_run, tmp_path, capsys):
    # the sweep run has no trajectories artifact
    rc = plot_trajectories.main(["--run", str(sweep_run), "--out", str(tmp_path / "x.png")])
    assert rc == 2
    assert "trajectories.csv" in capsys.readouterr().err


def test_files_outside_manifest_are_not_readable(wkb_run):
    run = figlib.RunDirectory(wkb_run)
    with pytest.raises(figlib.MissingArtifactError):
        run.path("run_manifest.json")  # present on disk but not a listed artifact


def test_render_is_deterministic(sweep_run, tmp_path):
    out1, out2 = tmp_path / "r1.png", tmp_path / "r2.png"
    plot_convergence.main(["--run", str(sweep_run), "--out", str(out1)])
    plot_convergence.main(["--run", str(sweep_run), "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()
