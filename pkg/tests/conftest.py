import pytest

from pyconfinedks.configuration import build_configuration
from pyconfinedks.grid import GridSpec, build_operators
from pyconfinedks.scf import scf_solve, solve_term
from pyconfinedks.types import FunctionalMode


@pytest.fixture(scope="session")
def grid_rc1():
    return build_operators(GridSpec(r_c=1.0))


@pytest.fixture(scope="session")
def grid_free():
    return build_operators(GridSpec(r_c="inf"))


@pytest.fixture(scope="session")
def he_plus_free():
    """One-electron He+ in the free-limit box."""
    return scf_solve(build_configuration(2, "1s_2S"), GridSpec(r_c="inf"))


@pytest.fixture(scope="session")
def he_rc1():
    return solve_term(2, "1s2_1S", GridSpec(r_c=1.0))


@pytest.fixture(scope="session")
def he_free():
    return solve_term(2, "1s2_1S", GridSpec(r_c="inf"))


@pytest.fixture(scope="session")
def he_triplet_rc2():
    return solve_term(2, "1s2s_3S", GridSpec(r_c=2.0))


@pytest.fixture(scope="session")
def li_rc2():
    return solve_term(3, "1s2_2s_2S", GridSpec(r_c=2.0), n_elec=3)


@pytest.fixture(scope="session")
def he_wigner_rc5():
    return solve_term(2, "1s2_1S", GridSpec(r_c=5.0), FunctionalMode.XC_WIGNER)
