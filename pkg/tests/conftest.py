import numpy as np
import pytest

from semiphase.grid import UniformGrid, WaveFunction, make_grid


def gaussian_packet(grid: UniformGrid, eps: float, x0: float = 0.0, p0: float = 0.0) -> WaveFunction:
    """Normalized minimal packet (eps pi)^{-1/4} exp(-(x-x0)^2/(2 eps) + i p0 x / eps)."""
    vals = (eps * np.pi) ** -0.25 * np.exp(-((grid.x - x0) ** 2) / (2 * eps))
    vals = vals.astype(complex) * np.exp(1j * p0 * grid.x / eps)
    return WaveFunction(grid, vals / grid.l2_norm(vals), eps)


def free_gaussian_exact(grid: UniformGrid, eps: float, t: float) -> np.ndarray:
    """Closed-form free evolution of the packet centered at 0 with p0 = 0."""
    return (eps * np.pi) ** -0.25 / np.sqrt(1 + 1j * t) * np.exp(
        -grid.x**2 / (2 * eps * (1 + 1j * t))
    )


def quantile_positions(grid: UniformGrid, rho: np.ndarray, n: int) -> np.ndarray:
    """Deterministic mid-quantile positions of a grid density (sampling-noise free)."""
    edges = grid.x_min - 0.5 * grid.dx + grid.dx * np.arange(grid.n + 1)
    cdf = np.concatenate([[0.0], np.cumsum(rho) * grid.dx])
    cdf /= cdf[-1]
    return np.interp((np.arange(n) + 0.5) / n, cdf, edges)


@pytest.fixture
def small_grid() -> UniformGrid:
    return make_grid(-np.pi, np.pi, 256)
