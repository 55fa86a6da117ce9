#!/usr/bin/env python3
"""Render the log-log convergence table of a sweep run: one curve per
distance observable against the scale parameter, annotated with the
fitted slopes stored alongside the table."""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from figlib import RunDirectory, run_script, save_figure


def render(run: RunDirectory, out_path: str, dpi: int = 150):
    table = run.csv("sweep.csv")
    slopes = {}
    if run.listed("sweep_slopes.csv"):
        for line in run.path("sweep_slopes.csv").read_text().strip().splitlines()[1:]:
            name, value = line.split(",")
            slopes[name] = float(value)

    eps = table["epsilon"]
    observables = [name for name in table.dtype.names if name not in ("epsilon", "n")]

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for name in observables:
        series = table[name]
        if np.any(series <= 0):
            continue  # signed observables have no log-log representation
        label = name
        if name in slopes:
            label += f" (slope {slopes[name]:.2f})"
        ax.loglog(eps, series, "o-", lw=1.2, ms=4, label=label)
    ax.invert_xaxis()  # the classical limit sits to the right
    ax.set_xlabel(r"scale $\varepsilon$")
    ax.set_ylabel("sliced-W1 distance")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(run.manifest["scenario"]["name"])
    fig.tight_layout()
    return save_figure(fig, run, out_path, dpi)


def main(argv=None) -> int:
    return run_script(render, __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
