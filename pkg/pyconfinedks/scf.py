import logging
from typing import Iterable

import numpy as np

from .angular import CouplingTable, build_coupling_table
from .config import SCFSettings
from .configuration import Configuration, build_configuration, family_configurations, parse_term
from .eigensolver import solve_channel
from .errors import SCFConvergenceError, SCFOscillationError
from .fields.density_01 import build_density
from .fields.exchange_03 import exchange_energy
from .fields.potentials_06 import build_potentials
from .grid import GridSpec, RadialGrid, build_operators
from .state import DensityField, EnergyComponents, Orbital, PotentialSet, SCFResult, TermEnergy, TermSolution
from .types import MIN_CAVITY_RADIUS, ORBITAL_LETTERS, OSCILLATION_WINDOW, DeterminantRole, FunctionalMode, Spin

logger = logging.getLogger(__name__)


# ===== ENERGY =====

def total_energy(
    Z: float,
    orbitals: Iterable[Orbital],
    density: DensityField,
    potentials: PotentialSet,
    grid: RadialGrid,
    coupling: CouplingTable,
    e_c: float = 0.0,
) -> EnergyComponents:
    orbitals = tuple(orbitals)
    r = grid.r_inner
    sqrt_w = np.sqrt(grid.norm_weights)

    T = 0.0
    for orb in orbitals:
        scaled = sqrt_w * orb.u
        centrifugal = orb.l * (orb.l + 1) / (2.0 * r ** 2)
        T += orb.occupancy * (scaled @ grid.t_kin @ scaled + grid.norm_weights @ (orb.u ** 2 * centrifugal))

    rho = density.rho
    V_en = -Z * grid.integrate(4.0 * np.pi * grid.r * rho)
    E_H = 0.5 * float(grid.volume_weights @ (rho * potentials.v_h))
    E_x = exchange_energy(density, orbitals, grid, coupling)

    return EnergyComponents(T=float(T), V_en=V_en, E_H=E_H, E_x=E_x, E_c=e_c)


# ===== CHANNELS =====

def _solve_channels(
    config: Configuration, v_sc: dict, v_en: np.ndarray, grid: RadialGrid
) -> tuple[Orbital, ...]:
    orbitals = []
    for (l, spin), shells in config.channels().items():
        k_states = max(s.n for s in shells) - l
        states = solve_channel(v_en + v_sc[spin], grid, l, k_states)
        for s in shells:
            eps, u = states[s.n - l - 1]
            orbitals.append(Orbital(n=s.n, l=l, spin=spin, occupancy=s.occupancy, eps=eps, u=u))
    return tuple(orbitals)


def _occupied_spins(config: Configuration) -> tuple:
    return tuple(spin for spin in Spin if any(s.spin is spin for s in config.shells))


# ===== SCF =====

def scf_solve(
    config: Configuration,
    spec: GridSpec,
    mode: FunctionalMode | str = FunctionalMode.X_ONLY,
    settings: SCFSettings | None = None,
) -> SCFResult:
    """Self-consistent solution of one determinant in a cavity of radius spec.r_c."""
    mode = FunctionalMode(mode)
    settings = settings or SCFSettings()
    if spec.r_c < MIN_CAVITY_RADIUS:
        raise ValueError(f"r_c = {spec.r_c:g} is below the {MIN_CAVITY_RADIUS} bohr floor")

    grid = build_operators(spec)
    coupling = build_coupling_table(config.l_values)
    spins = _occupied_spins(config)

    # 01. Bare-nucleus orbitals as the initial guess
    v_en = -config.Z / grid.r_inner
    v_sc = {spin: np.zeros(grid.N - 1) for spin in Spin}
    orbitals = _solve_channels(config, v_sc, v_en, grid)

    beta = settings.mixing
    history = []
    e_prev = None
    dv_prev = None
    rising = 0

    for iteration in range(1, settings.max_iter + 1):
        # 02. Density from the current orbitals
        density = build_density(orbitals, grid, config.n_elec)

        # 03. Potentials and correlation energy
        potentials, e_c = build_potentials(
            config.Z, orbitals, density, grid, coupling, mode, settings.lyp_spin
        )

        # 04. Energy of the current orbitals
        energy = total_energy(config.Z, orbitals, density, potentials, grid, coupling, e_c)

        # 05. Convergence check
        v_out = {spin: potentials.self_consistent(spin) for spin in Spin}
        dv = max(float(np.max(np.abs(v_out[s] - v_sc[s]))) for s in spins)
        dE = abs(energy.E_total - e_prev) if e_prev is not None else float("inf")
        history.append((energy.E_total, dv))
        logger.debug("iter %3d  E = %.10f  dE = %.2e  dv = %.2e  beta = %.3g",
                     iteration, energy.E_total, dE, dv, beta)

        if dE < settings.energy_tol and dv < settings.potential_tol:
            logger.info("%s [%s, r_c=%g] converged in %d iterations: E = %.8f",
                        config.term_label, mode.value, spec.r_c, iteration, energy.E_total)
            return SCFResult(
                term_label=config.term_label,
                Z=config.Z,
                mode=mode,
                r_c=spec.r_c,
                orbitals=orbitals,
                density=density,
                potentials=potentials,
                energy=energy,
                iterations=iteration,
                history=tuple(history),
            )

        # 06. Oscillation control
        rising = rising + 1 if dv_prev is not None and dv > dv_prev else 0
        if rising >= OSCILLATION_WINDOW:
            beta *= 0.5
            rising = 0
            logger.warning("%s: potential change grew %d times in a row, mixing reduced to %.4g",
                           config.term_label, OSCILLATION_WINDOW, beta)
            if beta < settings.min_mixing:
                raise SCFOscillationError(
                    f"SCF for {config.term_label} at r_c={spec.r_c:g} oscillates; "
                    f"mixing fell below {settings.min_mixing:g}, try a smaller starting mixing",
                    history,
                    beta,
                )

        # 07. Linear mixing of the self-consistent potential
        v_sc = {spin: (1.0 - beta) * v_sc[spin] + beta * v_out[spin] for spin in Spin}

        # 08. New orbitals
        orbitals = _solve_channels(config, v_sc, v_en, grid)
        e_prev = energy.E_total
        dv_prev = dv

    raise SCFConvergenceError(
        f"SCF for {config.term_label} at r_c={spec.r_c:g} did not converge "
        f"in {settings.max_iter} iterations",
        history,
    )


# ===== MULTIPLETS =====

def _source_orbital(source: SCFResult, n: int, l: int, spin: Spin) -> Orbital:
    same_shell = [o for o in source.orbitals if o.n == n and o.l == l]
    for orb in same_shell:
        if orb.spin is spin:
            return orb
    if same_shell:
        return same_shell[0]
    raise ValueError(f"{source.term_label} has no {n}{ORBITAL_LETTERS[l]} orbital to rebuild the determinant from")


def evaluate_determinant(
    config: Configuration,
    source: SCFResult,
    spec: GridSpec,
    settings: SCFSettings | None = None,
) -> SCFResult:
    """Energy of config on the converged orbitals of source, spins reassigned, without a new SCF.

    Each occupied shell takes the source orbital of the same (n, l), preferring
    the same spin; a flipped open-shell electron keeps its spatial orbital.
    """
    settings = settings or SCFSettings()
    grid = build_operators(spec)
    coupling = build_coupling_table(config.l_values)

    orbitals = []
    for shell in config.shells:
        orb = _source_orbital(source, shell.n, shell.l, shell.spin)
        orbitals.append(Orbital(
            n=shell.n, l=shell.l, spin=shell.spin, occupancy=shell.occupancy, eps=orb.eps, u=orb.u,
        ))
    orbitals = tuple(orbitals)

    density = build_density(orbitals, grid, config.n_elec)
    potentials, e_c = build_potentials(
        config.Z, orbitals, density, grid, coupling, source.mode, settings.lyp_spin
    )
    energy = total_energy(config.Z, orbitals, density, potentials, grid, coupling, e_c)
    logger.debug("%s [%s] rebuilt on %s orbitals: E = %.8f",
                 config.determinant_role.value, source.mode.value, source.term_label, energy.E_total)

    return SCFResult(
        term_label=config.term_label,
        Z=config.Z,
        mode=source.mode,
        r_c=source.r_c,
        orbitals=orbitals,
        density=density,
        potentials=potentials,
        energy=energy,
        iterations=0,
    )


def apply_sum_rule(high_spin: EnergyComponents, ms0: EnergyComponents) -> EnergyComponents:
    """Singlet from the diagonal sum rule: E(singlet) = 2 E(M_S = 0) - E(triplet)."""
    return ms0.combine(high_spin, 2.0, -1.0)


def solve_term(
    Z: int,
    term: str,
    spec: GridSpec,
    mode: FunctionalMode | str = FunctionalMode.X_ONLY,
    settings: SCFSettings | None = None,
    n_elec: int | None = None,
) -> TermSolution:
    """Energy of one term. Singlets of an open pair reuse the triplet's orbitals for M_S = 0."""
    mode = FunctionalMode(mode)
    family = family_configurations(Z, term, n_elec)

    results = {}
    for role, cfg in family.items():
        if role is DeterminantRole.MS0_AVERAGE:
            results[role] = evaluate_determinant(cfg, results[DeterminantRole.HIGH_SPIN], spec, settings)
        else:
            results[role] = scf_solve(cfg, spec, mode, settings)

    if DeterminantRole.MS0_AVERAGE in results:
        energy = apply_sum_rule(
            results[DeterminantRole.HIGH_SPIN].energy,
            results[DeterminantRole.MS0_AVERAGE].energy,
        )
    else:
        energy = next(iter(results.values())).energy

    return TermSolution(
        term_label=parse_term(term).label,
        Z=Z,
        mode=mode,
        r_c=spec.r_c,
        energy=energy,
        determinants=results,
    )


def _partner(term: str, multiplicity: int) -> str:
    config, _, term_symbol = parse_term(term).label.rpartition("_")
    return f"{config}_{multiplicity}{term_symbol[-1]}"


def multiplet_energies(
    Z: int,
    term: str,
    spec: GridSpec,
    modes: Iterable[FunctionalMode | str] = (FunctionalMode.X_ONLY,),
    settings: SCFSettings | None = None,
) -> tuple[TermEnergy, TermEnergy]:
    """(triplet, singlet) energies of a singly excited two-open-shell configuration.

    term may name either member of the pair. One SCF per mode; the singlet
    follows from the triplet orbitals.
    """
    symbol = parse_term(term)
    if len(symbol.open_subshells) != 2:
        raise ValueError(f"Sum rule needs two open subshells; '{term}' is not a singlet/triplet pair")

    triplet_label = _partner(term, 3)
    singlet_label = _partner(term, 1)
    triplet, singlet = {}, {}
    for mode in modes:
        mode = FunctionalMode(mode)
        high = scf_solve(build_configuration(Z, triplet_label, DeterminantRole.HIGH_SPIN), spec, mode, settings)
        ms0_config = build_configuration(Z, singlet_label, DeterminantRole.MS0_AVERAGE)
        ms0 = evaluate_determinant(ms0_config, high, spec, settings)
        triplet[mode] = high.E_total
        singlet[mode] = apply_sum_rule(high.energy, ms0.energy).E_total

    return TermEnergy(triplet_label, triplet), TermEnergy(singlet_label, singlet)
