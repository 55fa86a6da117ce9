#!/usr/bin/env python3
"""Render the position-density evolution of a run as a time-space heat map
with the density and current of the final snapshot below."""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from figlib import MissingArtifactError, RunDirectory, run_script, save_figure


def render(run: RunDirectory, out_path: str, dpi: int = 150):
    files = run.listed("densities/densities_*.csv")
    if not files:
        raise MissingArtifactError("run has no densities artifact (densities/densities_*.csv)")
    times = run.json("snapshots/snapshots.json")["times"]
    tables = [run.csv(f) for f in files]
    x = tables[0]["x"]
    rho = np.array([t["rho"] for t in tables])

    fig, (ax0, ax1) = plt.subplots(
        2, 1, figsize=(7.0, 6.0), sharex=True, height_ratios=[2.2, 1.0]
    )
    extent = [x[0], x[-1], times[0], times[-1]]
    im = ax0.imshow(rho, origin="lower", aspect="auto", extent=extent, cmap="magma")
    fig.colorbar(im, ax=ax0, label=r"$\rho(t,x)$")
    ax0.set_ylabel("t")
    ax0.set_title(run.manifest["scenario"]["name"])

    last = tables[-1]
    ax1.plot(x, last["rho"], lw=1.2, label=rf"$\rho$ at t={times[-1]:.3g}")
    ax1.plot(x, last["current"], lw=1.0, ls="--", label="current")
    ax1.set_xlabel("x")
    ax1.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return save_figure(fig, run, out_path, dpi)


def main(argv=None) -> int:
    return run_script(render, __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
