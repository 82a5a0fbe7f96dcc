import numpy as np

from ..grid import RadialGrid
from ..state import DensityField
from ..types import DENSITY_FLOOR, WIGNER_A, WIGNER_B


def wigner_energy_density(rho: np.ndarray) -> np.ndarray:
    """Correlation energy per volume, -rho / (a + b rho^(-1/3))."""
    rho = np.maximum(rho, DENSITY_FLOOR)
    return -rho / (WIGNER_A + WIGNER_B * rho ** (-1.0 / 3.0))


def wigner_potential(rho: np.ndarray) -> np.ndarray:
    rho = np.maximum(rho, DENSITY_FLOOR)
    s = rho ** (-1.0 / 3.0)
    return -(WIGNER_A + 4.0 / 3.0 * WIGNER_B * s) / (WIGNER_A + WIGNER_B * s) ** 2


def wigner_correlation(rho: DensityField, grid: RadialGrid) -> tuple[float, np.ndarray]:
    """Local Wigner-type correlation. Returns (E_c, v_c), v_c shared by both spins."""
    total = rho.rho
    e_c = float(grid.volume_weights @ wigner_energy_density(total))
    return e_c, wigner_potential(total)
