import numpy as np
import pytest

from pyconfinedks.angular import build_coupling_table, multipole_kernel_derivative
from pyconfinedks.errors import DegenerateDensityError
from pyconfinedks.fields.density_01 import build_density
from pyconfinedks.fields.exchange_03 import exchange_energy, exchange_field, exchange_potential
from pyconfinedks.grid import GridSpec, build_operators
from pyconfinedks.state import Orbital
from pyconfinedks.types import Spin


S_ONLY = build_coupling_table([0])


def _field(result, grid):
    return exchange_field(result.orbitals, result.density, grid, S_ONLY)


# ===== ONE ELECTRON =====

def test_one_electron_potential_cancels_hartree(he_plus_free):
    pots = he_plus_free.potentials
    np.testing.assert_allclose(pots.v_h + pots.v_x[Spin.UP], 0.0, atol=1e-8)


def test_one_electron_energy_cancels_hartree(he_plus_free):
    energy = he_plus_free.energy
    assert energy.E_x == pytest.approx(-energy.E_H, abs=1e-10)


def test_one_electron_field_is_enclosed_charge(he_plus_free, grid_free):
    field = _field(he_plus_free, grid_free)[Spin.UP]
    u = he_plus_free.orbitals[0].full()
    enclosed = grid_free.inner_integral(u ** 2)
    r = grid_free.r[1:-1]
    np.testing.assert_allclose(field[1:-1], -enclosed[1:-1] / r ** 2, atol=1e-10)


def test_empty_channel_has_zero_field(he_plus_free, grid_free):
    field = _field(he_plus_free, grid_free)
    assert not np.any(field[Spin.DOWN])
    assert not np.any(he_plus_free.potentials.v_x[Spin.DOWN])


# ===== CLOSED SHELL =====

def test_closed_shell_is_half_hartree(he_rc1):
    pots = he_rc1.primary.potentials
    for spin in Spin:
        np.testing.assert_allclose(pots.v_x[spin], -0.5 * pots.v_h, atol=1e-8)


def test_closed_shell_energy(he_rc1):
    energy = he_rc1.energy
    assert energy.E_x == pytest.approx(-0.5 * energy.E_H, abs=1e-10)


def test_free_limit_asymptote(he_free, grid_free):
    v_x = he_free.primary.potentials.v_x[Spin.UP]
    window = (grid_free.r > 10.0) & (grid_free.r < 30.0)
    np.testing.assert_allclose(v_x[window] * grid_free.r[window], -1.0, atol=1e-4)


def test_field_matches_direct_quadrature(he_free, grid_free):
    field = _field(he_free.primary, grid_free)[Spin.UP]
    u2 = he_free.primary.orbitals[0].full() ** 2
    r = grid_free.r
    direct = np.array([
        grid_free.w[1:] @ (u2[1:] * multipole_kernel_derivative(r_i, r[1:], 0)) for r_i in r[1:-1]
    ])
    scale = np.max(np.abs(field))
    assert np.max(np.abs(direct - field[1:-1])) < 1e-2 * scale


# ===== WALL AND POTENTIAL =====

@pytest.mark.parametrize("fixture", ["he_rc1", "he_triplet_rc2", "li_rc2"])
def test_wall_field_is_unit_charge(fixture, request):
    result = request.getfixturevalue(fixture).primary
    grid = build_operators(GridSpec(r_c=result.r_c))
    fields = _field(result, grid)
    for spin in Spin:
        if any(o.spin is spin for o in result.orbitals):
            assert fields[spin][-1] * grid.r_c ** 2 == pytest.approx(-1.0, rel=1e-6)


@pytest.mark.parametrize("fixture", ["he_rc1", "he_triplet_rc2"])
def test_potential_at_wall(fixture, request):
    result = request.getfixturevalue(fixture).primary
    v_x = result.potentials.v_x[Spin.UP]
    assert v_x[-1] == pytest.approx(-1.0 / result.r_c, rel=1e-12)


def test_potential_integrates_field(grid_rc1):
    field = -np.ones(grid_rc1.N + 1)
    # v(r) = -1/r_c - (r_c - r)
    np.testing.assert_allclose(exchange_potential(field, grid_rc1), -1.0 - (1.0 - grid_rc1.r), atol=1e-12)


def test_triplet_exchange_is_attractive(he_triplet_rc2):
    energy = he_triplet_rc2.energy
    assert energy.E_x < 0.0
    assert not np.any(he_triplet_rc2.primary.potentials.v_x[Spin.DOWN])


# ===== ERRORS =====

def test_vanishing_orbital_is_degenerate(grid_rc1):
    orb = Orbital(n=1, l=0, spin=Spin.UP, occupancy=1.0, eps=0.0, u=np.zeros(grid_rc1.N - 1))
    rho = build_density([orb], grid_rc1)
    with pytest.raises(DegenerateDensityError, match="vanishes"):
        exchange_field([orb], rho, grid_rc1, S_ONLY)


def test_energy_of_no_orbitals(grid_rc1, he_rc1):
    assert exchange_energy(he_rc1.primary.density, [], grid_rc1, S_ONLY) == 0.0
