import numpy as np
import pytest

from pyconfinedks.fields.density_01 import build_density
from pyconfinedks.fields.hartree_02 import hartree_from_rho, hartree_potential, nuclear_potential
from pyconfinedks.grid import GridSpec, build_operators
from pyconfinedks.state import DensityField, Orbital
from pyconfinedks.types import Spin


def _hydrogenic(grid, Z=1.0, spin=Spin.UP, occupancy=1.0):
    r = grid.r_inner
    u = 2.0 * Z ** 1.5 * r * np.exp(-Z * r)
    return Orbital(n=1, l=0, spin=spin, occupancy=occupancy, eps=-0.5 * Z * Z, u=u)


# ===== DENSITY =====

def test_hydrogenic_density_normalization(grid_free):
    rho = build_density([_hydrogenic(grid_free)], grid_free, n_elec=1)
    assert rho.n_elec == pytest.approx(1.0, abs=1e-8)
    assert grid_free.volume_weights @ rho.rho == pytest.approx(1.0, abs=1e-8)


def test_hydrogenic_density_values(grid_free):
    rho = build_density([_hydrogenic(grid_free)], grid_free)
    exact = np.exp(-2.0 * grid_free.r) / np.pi
    np.testing.assert_allclose(rho.rho[:-1], exact[:-1], atol=1e-8)
    # origin value from the u'(0)^2 limit
    assert rho.rho[0] == pytest.approx(1.0 / np.pi, rel=1e-6)


def test_spin_split(grid_free):
    up = _hydrogenic(grid_free, spin=Spin.UP)
    down = _hydrogenic(grid_free, spin=Spin.DOWN)
    rho = build_density([up, down], grid_free, n_elec=2)
    np.testing.assert_array_equal(rho.rho_up, rho.rho_down)
    np.testing.assert_array_equal(rho.spin(Spin.DOWN), rho.rho_down)


def test_closed_shell_density(he_rc1):
    rho = he_rc1.primary.density
    assert rho.n_elec == pytest.approx(2.0, abs=1e-8)
    assert rho.rho[-1] == 0.0
    assert np.all(rho.rho >= 0.0)
    np.testing.assert_allclose(rho.rho_up, rho.rho_down, atol=1e-12)


def test_occupancy_mismatch(grid_free):
    with pytest.raises(ValueError, match="expected 2 electrons"):
        build_density([_hydrogenic(grid_free)], grid_free, n_elec=2)


def test_floored_density(grid_free):
    rho = DensityField.from_spin_densities(np.zeros(grid_free.N + 1), np.zeros(grid_free.N + 1), grid_free)
    up, down = rho.floored()
    assert np.all(up > 0.0) and np.all(down > 0.0)


# ===== NUCLEAR POTENTIAL =====

def test_nuclear_potential(grid_rc1):
    v = nuclear_potential(2.0, grid_rc1)
    assert v[0] == -np.inf
    np.testing.assert_allclose(v[1:] * grid_rc1.r[1:], -2.0)


# ===== HARTREE =====

def test_hartree_of_hydrogenic_density(grid_free):
    rho = np.exp(-2.0 * grid_free.r) / np.pi
    v = hartree_from_rho(rho, grid_free)
    r = grid_free.r[1:]
    exact = 1.0 / r - np.exp(-2.0 * r) * (1.0 + 1.0 / r)
    np.testing.assert_allclose(v[1:], exact, atol=1e-8)
    # finite at the origin: v_H(0) = Z for the hydrogenic 1s density
    assert v[0] == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("r_c", [1.0, 3.0])
def test_hartree_of_uniform_ball(r_c):
    grid = build_operators(GridSpec(r_c=r_c))
    q = 2.0
    rho = np.full(grid.N + 1, 3.0 * q / (4.0 * np.pi * r_c ** 3))
    v = hartree_from_rho(rho, grid)
    exact = q * (3.0 * r_c ** 2 - grid.r ** 2) / (2.0 * r_c ** 3)
    np.testing.assert_allclose(v, exact, atol=1e-10)
    assert v[-1] == pytest.approx(q / r_c, rel=1e-10)


def test_gauss_law(he_rc1, grid_rc1):
    rho = he_rc1.primary.density
    v = hartree_potential(rho, grid_rc1)
    r = grid_rc1.r
    enclosed = grid_rc1.inner_integral(4.0 * np.pi * r ** 2 * rho.rho)
    np.testing.assert_allclose(-(r ** 2 * (grid_rc1.D1 @ v))[1:], enclosed[1:], rtol=1e-6, atol=1e-8)
    assert -(r[-1] ** 2) * (grid_rc1.D1 @ v)[-1] == pytest.approx(2.0, abs=1e-7)


def test_hartree_at_wall(he_rc1, grid_rc1):
    v = hartree_potential(he_rc1.primary.density, grid_rc1)
    assert v[-1] == pytest.approx(2.0 / grid_rc1.r_c, rel=1e-9)
