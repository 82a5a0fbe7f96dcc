import logging
from typing import Iterable, Iterator

import numpy as np

from ..angular import CouplingTable
from ..errors import DegenerateDensityError
from ..grid import RadialGrid
from ..state import DensityField, Orbital
from ..types import Spin

logger = logging.getLogger(__name__)


def _same_spin(orbitals: Iterable[Orbital], spin: Spin) -> list[Orbital]:
    return [o for o in orbitals if o.spin is spin and o.occupancy > 0]


def _shell_pairs(
    shells: list[Orbital], coupling: CouplingTable
) -> Iterator[tuple[Orbital, Orbital, int, float]]:
    for a in shells:
        for b in shells:
            same = a is b
            for k in coupling.multipoles(a.l, b.l):
                weight = coupling.exchange_weight(a.l, a.occupancy, b.l, b.occupancy, k, same)
                if weight:
                    yield a, b, k, weight


def _radial_integrals(pair: np.ndarray, k: int, grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    """int_0^r P r'^k dr' and int_r^{r_c} P / r'^(k+1) dr' for a shell-pair product P = u_a u_b."""
    r = grid.r
    inner = grid.inner_integral(pair * r ** k)
    scaled = np.zeros_like(pair)
    scaled[1:] = pair[1:] / r[1:] ** (k + 1)
    outer = grid.tail_integral(scaled)
    return inner, outer


def _field_kernel(pair: np.ndarray, k: int, grid: RadialGrid) -> np.ndarray:
    r = grid.r[1:]
    inner, outer = _radial_integrals(pair, k, grid)
    kernel = np.zeros_like(pair)
    kernel[1:] = -(k + 1) * inner[1:] / r ** (k + 2)
    if k:
        kernel[1:] += k * r ** (k - 1) * outer[1:]
    return kernel


def _potential_kernel(pair: np.ndarray, k: int, grid: RadialGrid) -> np.ndarray:
    r = grid.r[1:]
    inner, outer = _radial_integrals(pair, k, grid)
    kernel = np.zeros_like(pair)
    kernel[1:] = inner[1:] / r ** (k + 1) + r ** k * outer[1:]
    if k == 0:
        kernel[0] = outer[0]
    return kernel


def _channel_field(shells: list[Orbital], grid: RadialGrid, coupling: CouplingTable) -> np.ndarray:
    U = {id(o): o.full() for o in shells}
    dU = {key: grid.D1 @ u for key, u in U.items()}

    denom = sum(o.occupancy * U[id(o)] ** 2 for o in shells)
    denom_wall = sum(o.occupancy * dU[id(o)][-1] ** 2 for o in shells)
    if np.any(denom[1:-1] <= 0.0) or denom_wall <= 0.0:
        raise DegenerateDensityError("Spin density vanishes inside the cavity; exchange hole is undefined")

    numer = np.zeros(grid.N + 1)
    numer_wall = 0.0
    for a, b, k, weight in _shell_pairs(shells, coupling):
        ua, ub = U[id(a)], U[id(b)]
        kernel = _field_kernel(ua * ub, k, grid)
        numer += weight * ua * ub * kernel
        numer_wall += weight * dU[id(a)][-1] * dU[id(b)][-1] * kernel[-1]

    field = np.zeros(grid.N + 1)
    field[1:-1] = numer[1:-1] / denom[1:-1]
    field[-1] = numer_wall / denom_wall
    return field


def exchange_field(
    orbitals: Iterable[Orbital],
    rho: DensityField,
    grid: RadialGrid,
    coupling: CouplingTable,
) -> dict:
    """Radial field of the same-spin Fermi hole, one array per spin channel.

    A channel without electrons gets a zero field. The r = 0 entry is the
    symmetry value 0, the r = r_c entry is the limit taken from u'(r_c).
    """
    orbitals = tuple(orbitals)
    fields = {}
    for spin in Spin:
        shells = _same_spin(orbitals, spin)
        if not shells:
            fields[spin] = np.zeros(grid.N + 1)
            continue
        fields[spin] = _channel_field(shells, grid, coupling)
        logger.debug(
            "exchange field %s: %d shells, E(r_c) * r_c^2 = %.8f",
            spin.value, len(shells), fields[spin][-1] * grid.r_c ** 2,
        )
    return fields


def exchange_potential(field: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Work done against the hole field, integrated inward from the wall.

    The exterior field is that of a unit negative charge, which fixes
    v_x(r_c) = -1/r_c.
    """
    return -1.0 / grid.r_c + grid.tail_integral(field)


def exchange_energy(
    rho: DensityField,
    orbitals: Iterable[Orbital],
    grid: RadialGrid,
    coupling: CouplingTable,
) -> float:
    """E_x = 1/2 int int rho rho_x / |r - r'| reduced to same-spin shell-pair multipole integrals."""
    orbitals = tuple(orbitals)
    total = 0.0
    for spin in Spin:
        shells = _same_spin(orbitals, spin)
        for a, b, k, weight in _shell_pairs(shells, coupling):
            pair = a.full() * b.full()
            total += weight * grid.integrate(pair * _potential_kernel(pair, k, grid))
    return -0.5 * total
