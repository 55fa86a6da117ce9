"""External potentials: smooth, nonnegative, with analytic derivatives.

Built-in variants: free space, harmonic well omega^2 x^2 / 2, offset cosine
lattice A (1 + cos kx), and polynomial wells constrained nonnegative on the
evaluation domain.  Every variant exposes value, gradient and curvature in
closed form; ``validate_potential`` cross-checks the gradient against centered
finite differences on a given grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import UniformGrid


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class Potential:
    """Base class; subclasses implement value/grad/curvature in closed form."""

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def curvature(self, x):
        """Second derivative, needed by characteristic (ray) flows."""
        raise NotImplementedError

    def as_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Free(Potential):
    def value(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def grad(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def curvature(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def as_dict(self) -> dict:
        return {"kind": "free"}


@dataclass(frozen=True)
class Harmonic(Potential):
    """V(x) = omega^2 x^2 / 2; the classical oscillation frequency is omega."""

    omega: float = 1.0

    def __post_init__(self) -> None:
        if self.omega < 0:
            raise PotentialError(f"harmonic stiffness must be >= 0, got {self.omega}")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.omega**2 * x**2

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        return self.omega**2 * x

    def curvature(self, x):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, self.omega**2)

    def as_dict(self) -> dict:
        return {"kind": "harmonic", "omega": self.omega}


@dataclass(frozen=True)
class CosineLattice(Potential):
    """V(x) = A (1 + cos kx), offset so V >= 0 everywhere."""

    amplitude: float = 1.0
    wavevector: float = 1.0

    def __post_init__(self) -> None:
        if self.amplitude < 0:
            raise PotentialError(f"lattice amplitude must be >= 0, got {self.amplitude}")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * (1.0 + np.cos(self.wavevector * x))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        return -self.amplitude * self.wavevector * np.sin(self.wavevector * x)

    def curvature(self, x):
        x = np.asarray(x, dtype=float)
        return -self.amplitude * self.wavevector**2 * np.cos(self.wavevector * x)

    def as_dict(self) -> dict:
        return {"kind": "cosine_lattice", "amplitude": self.amplitude, "wavevector": self.wavevector}


@dataclass(frozen=True)
class PolynomialWell(Potential):
    """V(x) = sum_i c_i x^i with c in ascending order; nonnegativity is checked
    on the evaluation domain at validation time."""

    coefficients: tuple = (0.0,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.polynomial.polynomial.polyval(x, self.coefficients)

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        der = np.polynomial.polynomial.polyder(self.coefficients)
        return np.polynomial.polynomial.polyval(x, der)

    def curvature(self, x):
        x = np.asarray(x, dtype=float)
        der2 = np.polynomial.polynomial.polyder(self.coefficients, 2)
        return np.polynomial.polynomial.polyval(x, der2)

    def as_dict(self) -> dict:
        return {"kind": "polynomial", "coefficients": list(self.coefficients)}


def validate_potential(potential: Potential, grid: UniformGrid, *, seed: int = 0) -> None:
    """Check nonnegativity on the grid and gradient consistency with centered
    finite differences (tolerance 1e-8 times the local scale) at 100 points."""
    v = potential.value(grid.x)
    if np.min(v) < -1e-12 * max(1.0, float(np.max(np.abs(v)))):
        raise PotentialError(
            f"potential {potential.as_dict()['kind']} is negative on the grid "
            f"(min {np.min(v):.3e})"
        )
    rng = np.random.default_rng(seed)
    pts = rng.uniform(grid.x_min, grid.x_max, size=100)
    h = 1e-5 * max(1.0, grid.length / 16.0)
    fd = (potential.value(pts + h) - potential.value(pts - h)) / (2.0 * h)
    exact = potential.grad(pts)
    scale = max(1.0, float(np.max(np.abs(exact))))
    err = float(np.max(np.abs(fd - exact)))
    if err > 1e-8 * scale:
        raise PotentialError(
            f"analytic gradient of {potential.as_dict()['kind']} disagrees with "
            f"finite differences (max error {err:.3e})"
        )


_KINDS = {
    "free": Free,
    "harmonic": Harmonic,
    "cosine_lattice": CosineLattice,
    "polynomial": PolynomialWell,
}


def potential_from_dict(spec: dict, grid: UniformGrid | None = None) -> Potential:
    """Build a potential from its serialized form; validates on grid if given."""
    kind = spec.get("kind")
    if kind not in _KINDS:
        raise PotentialError(f"unknown potential kind {kind!r}; choices: {sorted(_KINDS)}")
    kwargs = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "polynomial":
        kwargs = {"coefficients": tuple(kwargs.get("coefficients", (0.0,)))}
    pot = _KINDS[kind](**kwargs)
    if grid is not None:
        validate_potential(pot, grid)
    return pot
