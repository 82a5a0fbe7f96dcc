import logging
from typing import Iterable

import numpy as np

from ..angular import CouplingTable
from ..grid import RadialGrid
from ..state import DensityField, Orbital, PotentialSet
from ..types import FunctionalMode, Spin
from .exchange_03 import exchange_field, exchange_potential
from .hartree_02 import hartree_potential, nuclear_potential
from .lyp_05 import LypSpin, lyp_correlation
from .wigner_04 import wigner_correlation

logger = logging.getLogger(__name__)


def correlation(
    mode: FunctionalMode,
    rho: DensityField,
    grid: RadialGrid,
    lyp_spin: LypSpin = "resolved",
) -> tuple[float, dict]:
    """(E_c, {spin: v_c}) of the active functional; zeros for x_only."""
    mode = FunctionalMode(mode)
    if mode is FunctionalMode.X_ONLY:
        zero = np.zeros(grid.N + 1)
        return 0.0, {Spin.UP: zero, Spin.DOWN: zero}
    if mode is FunctionalMode.XC_WIGNER:
        e_c, v_c = wigner_correlation(rho, grid)
        return e_c, {Spin.UP: v_c, Spin.DOWN: v_c}
    return lyp_correlation(rho, grid, lyp_spin)


def build_potentials(
    Z: float,
    orbitals: Iterable[Orbital],
    rho: DensityField,
    grid: RadialGrid,
    coupling: CouplingTable,
    mode: FunctionalMode,
    lyp_spin: LypSpin = "resolved",
) -> tuple[PotentialSet, float]:
    """Every term of v_eff for the current orbitals, plus the correlation energy."""
    orbitals = tuple(orbitals)

    v_en = nuclear_potential(Z, grid)
    v_h = hartree_potential(rho, grid)

    fields = exchange_field(orbitals, rho, grid, coupling)
    v_x = {}
    for spin in Spin:
        if not any(o.spin is spin and o.occupancy > 0 for o in orbitals):
            v_x[spin] = np.zeros(grid.N + 1)
        else:
            v_x[spin] = exchange_potential(fields[spin], grid)

    e_c, v_c = correlation(mode, rho, grid, lyp_spin)

    return PotentialSet(r=grid.r, v_en=v_en, v_h=v_h, v_x=v_x, v_c=v_c), e_c
