from .grid import GridSpec, RadialGrid, build_operators, collocation_points, map_to_radial
from .angular import CouplingTable, build_coupling_table, clebsch_gordan, multipole_kernel_derivative
from .configuration import Configuration, build_configuration, family_configurations, parse_term
from .eigensolver import solve_channel
from .scf import apply_sum_rule, evaluate_determinant, multiplet_energies, scf_solve, solve_term, total_energy
from .observables import (
    component_differences,
    correlation_scan,
    critical_radius,
    independent_particle_energy,
    locate_crossing,
    moments,
    potential_profiles,
    radial_distribution,
    radial_moment,
    state_ordering,
)
from .config import JobConfig, SCFSettings, parse_config
from .state import DensityField, EnergyComponents, MomentSet, Orbital, PotentialSet, SCFResult, TermEnergy, TermSolution
from .types import FunctionalMode, Spin

__version__ = "1.0.0"
