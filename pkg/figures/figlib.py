"""Shared plumbing for the figure scripts.

Figures consume completed run directories produced by the semiphase CLI and
nothing else: a directory without a manifest is refused, only files listed in
the manifest are opened, and every rendered image embeds the manifest digest
in its PNG metadata for provenance.  No physics is recomputed here.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

MANIFEST_NAME = "run_manifest.json"
DIGEST_KEY = "semiphase:manifest-sha256"


class IncompleteRunError(RuntimeError):
    """The directory has no manifest and is not a completed run."""


class MissingArtifactError(FileNotFoundError):
    """A required artifact is absent from the run manifest."""


class RunDirectory:
    """Manifest-gated, read-only view of a run directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest_path = self.root / MANIFEST_NAME
        if not manifest_path.exists():
            raise IncompleteRunError(
                f"{self.root} contains no {MANIFEST_NAME}; refusing to plot an incomplete run"
            )
        raw = manifest_path.read_bytes()
        self.manifest = json.loads(raw)
        self.manifest_digest = hashlib.sha256(raw).hexdigest()
        self._listed = {entry["path"] for entry in self.manifest["files"]}

    def listed(self, pattern: str) -> list[str]:
        """Manifest paths matching a glob-like prefix/suffix pattern."""
        from fnmatch import fnmatch

        return sorted(p for p in self._listed if fnmatch(p, pattern))

    def path(self, rel: str) -> Path:
        if rel not in self._listed:
            raise MissingArtifactError(
                f"artifact {rel!r} is not listed in the manifest of {self.root}"
            )
        full = self.root / rel
        if not full.exists():
            raise MissingArtifactError(f"artifact {rel!r} is listed but missing on disk")
        return full

    def csv(self, rel: str) -> np.ndarray:
        """Load a headered CSV artifact as a structured array."""
        return np.atleast_1d(np.genfromtxt(self.path(rel), delimiter=",", names=True))

    def json(self, rel: str) -> dict:
        return json.loads(self.path(rel).read_text())


def save_figure(fig, run: RunDirectory, out_path: str | Path, dpi: int = 150) -> Path:
    """Write the figure with the run's manifest digest embedded as metadata.

    PNG carries the digest as a free-form text chunk; SVG uses the standard
    Description field (the SVG backend only accepts Dublin-Core-style keys).
    """
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix.lower() == ".svg":
        metadata = {"Description": f"{DIGEST_KEY}={run.manifest_digest}"}
    else:
        metadata = {DIGEST_KEY: run.manifest_digest}
    fig.savefig(out, dpi=dpi, metadata=metadata)
    return out


def make_parser(description: str):
    import argparse

    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--run", required=True, help="completed run directory")
    parser.add_argument("--out", required=True, help="output image path (PNG)")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def run_script(render, description: str, argv=None) -> int:
    """Shared CLI driver: refusals and missing artifacts exit 2 with a name."""
    import sys

    args = make_parser(description).parse_args(argv)
    try:
        run = RunDirectory(args.run)
        out = render(run, args.out, args.dpi)
    except (IncompleteRunError, MissingArtifactError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0
