import numpy as np

from ..grid import RadialGrid
from ..state import DensityField


def nuclear_potential(Z: float, grid: RadialGrid) -> np.ndarray:
    v = np.full(grid.N + 1, -np.inf)
    v[1:] = -Z / grid.r[1:]
    return v


def hartree_from_rho(rho: np.ndarray, grid: RadialGrid) -> np.ndarray:
    r = grid.r
    enclosed = grid.inner_integral(4.0 * np.pi * r ** 2 * rho)
    outer = grid.tail_integral(4.0 * np.pi * r * rho)
    v = outer.copy()
    v[1:] += enclosed[1:] / r[1:]
    return v


def hartree_potential(rho: DensityField, grid: RadialGrid) -> np.ndarray:
    """v_H(r) = Q(r)/r + int_r^{r_c} 4 pi r' rho dr', with Q the enclosed charge."""
    return hartree_from_rho(rho.rho, grid)
