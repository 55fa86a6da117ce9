#!/usr/bin/env python3
"""Render phase-space heat maps of the measures stored in a run: one panel
per particle-list artifact (velocity-graph measure, smoothed transform,
tabulated limits), binned on a common (x, p) window."""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from figlib import MissingArtifactError, RunDirectory, run_script, save_figure

PANEL_ORDER = (
    ("measures/beta.csv", "velocity-graph measure"),
    ("measures/bohmian_measure.csv", "velocity-graph measure"),
    ("measures/husimi_measure.csv", "smoothed transform"),
    ("measures/limit_bohmian.csv", "graph-measure limit"),
    ("measures/limit_wigner.csv", "transform limit"),
)


def render(run: RunDirectory, out_path: str, dpi: int = 150, bins: int = 160):
    panels = [(rel, title) for rel, title in PANEL_ORDER if run.listed(rel)]
    if not panels:
        raise MissingArtifactError("run has no phase-space measure artifacts (measures/*.csv)")
    tables = [(run.csv(rel), title) for rel, title in panels]

    all_x = np.concatenate([t["x"] for t, _ in tables])
    all_p = np.concatenate([t["p"] for t, _ in tables])
    pad_x = 0.05 * (all_x.max() - all_x.min() + 1e-12)
    pad_p = 0.05 * (all_p.max() - all_p.min() + 1e-12)
    x_edges = np.linspace(all_x.min() - pad_x, all_x.max() + pad_x, bins + 1)
    p_edges = np.linspace(all_p.min() - pad_p, all_p.max() + pad_p, bins + 1)

    n = len(tables)
    fig, axes = plt.subplots(1, n, figsize=(4.0 * n, 3.6), sharex=True, sharey=True)
    axes = np.atleast_1d(axes)
    for ax, (table, title) in zip(axes, tables):
        hist, _, _ = np.histogram2d(
            table["x"], table["p"], bins=[x_edges, p_edges], weights=table["weight"]
        )
        ax.imshow(
            hist.T,
            origin="lower",
            aspect="auto",
            extent=[x_edges[0], x_edges[-1], p_edges[0], p_edges[-1]],
            cmap="viridis",
        )
        ax.set_title(title, fontsize=9)
        ax.set_xlabel("x")
    axes[0].set_ylabel("p")
    fig.suptitle(run.manifest["scenario"]["name"], fontsize=10)
    fig.tight_layout()
    return save_figure(fig, run, out_path, dpi)


def main(argv=None) -> int:
    return run_script(render, __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
