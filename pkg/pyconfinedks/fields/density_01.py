from typing import Iterable

import numpy as np

from ..grid import RadialGrid
from ..state import DensityField, Orbital
from ..types import Spin


def build_density(
    orbitals: Iterable[Orbital],
    grid: RadialGrid,
    n_elec: float | None = None,
) -> DensityField:
    """rho_s(r) = sum occ u^2 / (4 pi r^2) per spin; the r = 0 value is the u'(0)^2 limit."""
    orbitals = tuple(orbitals)
    occupied = sum(o.occupancy for o in orbitals)
    if n_elec is not None and abs(occupied - n_elec) > 1e-12:
        raise ValueError(f"Occupancies sum to {occupied:g}, expected {n_elec:g} electrons")

    r = grid.r
    spins = {Spin.UP: np.zeros(grid.N + 1), Spin.DOWN: np.zeros(grid.N + 1)}
    for orb in orbitals:
        u = orb.full()
        du0 = grid.D1[0] @ u
        rho = spins[orb.spin]
        rho[1:-1] += orb.occupancy * u[1:-1] ** 2 / (4.0 * np.pi * r[1:-1] ** 2)
        rho[0] += orb.occupancy * du0 ** 2 / (4.0 * np.pi)

    return DensityField.from_spin_densities(spins[Spin.UP], spins[Spin.DOWN], grid)
