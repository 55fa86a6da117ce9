#!/usr/bin/env python3
"""Render the stored trajectory bundle of a run: world lines x(t), colored by
final particle status, with the momentum record in a side panel."""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from figlib import RunDirectory, run_script, save_figure

STATUS_COLORS = {0: "tab:blue", 1: "tab:red", 2: "tab:orange"}


def render(run: RunDirectory, out_path: str, dpi: int = 150):
    data = run.csv("trajectories.csv")
    meta = run.json("trajectories.json")

    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9.0, 4.5), width_ratios=[2.0, 1.0])
    for pid in np.unique(data["particle"]):
        rows = data[data["particle"] == pid]
        order = np.argsort(rows["t"])
        status = int(rows["status"][0])
        color = STATUS_COLORS.get(status, "gray")
        ax0.plot(rows["t"][order], rows["x"][order], lw=0.5, alpha=0.5, color=color)
        ax1.plot(rows["t"][order], rows["p"][order], lw=0.5, alpha=0.4, color=color)
    ax0.set_xlabel("t")
    ax0.set_ylabel("x")
    ax0.set_title(
        f"{run.manifest['scenario']['name']}: "
        f"{meta['stored_particles']} of {meta['n_particles']} world lines"
    )
    ax1.set_xlabel("t")
    ax1.set_ylabel("p")
    fig.tight_layout()
    return save_figure(fig, run, out_path, dpi)


def main(argv=None) -> int:
    return run_script(render, __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
