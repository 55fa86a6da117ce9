"""Numerical toolkit for eps-scaled Schrodinger dynamics and the comparison
of Bohmian and Wigner phase-space measures in the classical limit."""

from . import bohmian, distances, grid, hydrodynamics, phasespace, potentials, schrodinger, semiclassics
from .grid import UniformGrid, WaveFunction, make_grid

__version__ = "0.1.0"

__all__ = [
    "UniformGrid",
    "WaveFunction",
    "make_grid",
    "bohmian",
    "distances",
    "grid",
    "hydrodynamics",
    "phasespace",
    "potentials",
    "schrodinger",
    "semiclassics",
    "__version__",
]
