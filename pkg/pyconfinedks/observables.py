import logging
from typing import Iterable

import numpy as np
from scipy.optimize import brentq

from .config import SCFSettings
from .configuration import parse_term
from .eigensolver import solve_channel
from .errors import ConfinedKSError
from .grid import GridSpec, RadialGrid, build_operators
from .helpers import ordered_map
from .scf import solve_term
from .state import (
    CorrelationPoint,
    DensityField,
    EnergyComponents,
    MomentSet,
    ProfileTable,
    SCFResult,
    TermSolution,
)
from .types import MOMENT_ORDERS, FunctionalMode, Spin

logger = logging.getLogger(__name__)


def _determinant(result: SCFResult | TermSolution) -> SCFResult:
    return result.primary if isinstance(result, TermSolution) else result


# ===== MOMENTS =====

def radial_moment(rho: DensityField, k: int, grid: RadialGrid) -> float:
    """<r^k> = int rho r^k d^3r with the density normalized to N."""
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise TypeError(f"Moment order must be an integer, got {k!r}")
    if k < -2:
        raise ValueError(f"Moment order must be >= -2, got {k}")
    # r^0 at the origin is 1, which keeps k = -2 finite there
    return grid.integrate(4.0 * np.pi * rho.rho * np.power(grid.r, k + 2))


def moments(
    result: SCFResult | TermSolution,
    grid: RadialGrid,
    orders: Iterable[int] = MOMENT_ORDERS,
    unit_normalized: bool = False,
    system: str | None = None,
) -> MomentSet:
    det = _determinant(result)
    scale = 1.0 / det.density.n_elec if unit_normalized else 1.0
    values = {k: scale * radial_moment(det.density, k, grid) for k in orders}
    return MomentSet(
        term_label=result.term_label,
        mode=result.mode,
        r_c=result.r_c,
        values=values,
        unit_normalized=unit_normalized,
        system=system,
    )


# ===== PROFILES =====

def radial_distribution(
    result: SCFResult | TermSolution, grid: RadialGrid, points: int = 1000
) -> tuple[ProfileTable, ProfileTable]:
    """D_nl = u^2 per occupied orbital and the total r^2 rho.

    Returns the collocation-point table and its interpolated resampling on
    `points` uniform radii.
    """
    det = _determinant(result)
    columns = {}
    for orb in det.orbitals:
        columns[f"D_{orb.label}_{orb.spin.value}"] = orb.full() ** 2
    columns["r2rho"] = grid.r ** 2 * det.density.rho

    r_uniform = grid.uniform_radii(points)
    resampled = {name: grid.interpolate(values, r_uniform) for name, values in columns.items()}
    return ProfileTable(grid.r, columns), ProfileTable(r_uniform, resampled)


def potential_profiles(result: SCFResult | TermSolution) -> ProfileTable:
    pots = _determinant(result).potentials
    columns = {"v_en": pots.v_en, "v_h": pots.v_h}
    v_eff = pots.v_eff
    for name, per_spin in (("v_x", pots.v_x), ("v_c", pots.v_c), ("v_eff", v_eff)):
        for spin in Spin:
            columns[f"{name}_{spin.value}"] = per_spin[spin]
    return ProfileTable(pots.r, columns)


# ===== ENERGY DIFFERENCES =====

def component_differences(
    a: SCFResult | TermSolution, b: SCFResult | TermSolution
) -> EnergyComponents:
    """Component-wise a - b; V_ee of the result is the electron-electron difference."""
    return a.energy - b.energy


def independent_particle_energy(term: str, r_c: float, spec: GridSpec | None = None) -> float:
    """Sum of non-interacting particle-in-sphere levels over the occupied subshells."""
    spec = (spec or GridSpec(r_c=r_c)).with_radius(r_c)
    grid = build_operators(spec)
    zero = np.zeros(grid.N - 1)
    total = 0.0
    for n, l, q in parse_term(term).subshells:
        eps, _ = solve_channel(zero, grid, l, n - l)[n - l - 1]
        total += q * eps
    return total


def state_ordering(
    Z: int,
    terms: Iterable[str],
    r_c: float,
    mode: FunctionalMode | str,
    spec: GridSpec,
    settings: SCFSettings | None = None,
    n_elec: int | None = None,
    jobs: int = 1,
) -> list[tuple[str, float]]:
    """(term, E_total) pairs sorted by energy at one cavity radius."""
    spec = spec.with_radius(r_c)
    terms = list(terms)
    solved = ordered_map(lambda t: solve_term(Z, t, spec, mode, settings, n_elec), terms, jobs)
    return sorted(((s.term_label, s.E_total) for s in solved), key=lambda pair: pair[1])


def _bracketed_root(fn, bracket: tuple[float, float], what: str, xtol: float) -> float:
    lo, hi = sorted(bracket)
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError(
            f"No sign change of {what} on [{lo:g}, {hi:g}] (values {f_lo:.6f}, {f_hi:.6f})"
        )
    return float(brentq(fn, lo, hi, xtol=xtol))


def locate_crossing(
    Z: int,
    term_a: str,
    term_b: str,
    bracket: tuple[float, float],
    mode: FunctionalMode | str,
    spec: GridSpec,
    settings: SCFSettings | None = None,
    n_elec: int | None = None,
    xtol: float = 1e-3,
) -> float:
    """Cavity radius where E(term_a) - E(term_b) changes sign."""

    def delta(r_c: float) -> float:
        grid_spec = spec.with_radius(r_c)
        e_a = solve_term(Z, term_a, grid_spec, mode, settings, n_elec).E_total
        e_b = solve_term(Z, term_b, grid_spec, mode, settings, n_elec).E_total
        logger.debug("crossing %s/%s at r_c=%.6f: dE = %.8f", term_a, term_b, r_c, e_a - e_b)
        return e_a - e_b

    return _bracketed_root(delta, bracket, f"E({term_a}) - E({term_b})", xtol)


def critical_radius(
    Z: int,
    term: str,
    bracket: tuple[float, float],
    mode: FunctionalMode | str,
    spec: GridSpec,
    settings: SCFSettings | None = None,
    n_elec: int | None = None,
    xtol: float = 1e-4,
) -> float:
    """Cavity radius at which the term's total energy crosses zero."""

    def energy(r_c: float) -> float:
        return solve_term(Z, term, spec.with_radius(r_c), mode, settings, n_elec).E_total

    return _bracketed_root(energy, bracket, f"E({term})", xtol)


# ===== CORRELATION SCANS =====

def correlation_scan(
    Z: int,
    terms: Iterable[str],
    radii: Iterable[float],
    mode: FunctionalMode | str,
    spec: GridSpec,
    settings: SCFSettings | None = None,
    n_elec: int | None = None,
    jobs: int = 1,
) -> list[CorrelationPoint]:
    """|E_c| over a cavity-radius ladder with the gap to the exchange-only energy.

    A point whose SCF fails is reported with status FAILED; the scan goes on.
    """
    mode = FunctionalMode(mode)
    points = [(term, r_c) for term in terms for r_c in radii]

    def run(point: tuple[str, float]) -> CorrelationPoint:
        term, r_c = point
        grid_spec = spec.with_radius(r_c)
        try:
            x_only = solve_term(Z, term, grid_spec, FunctionalMode.X_ONLY, settings, n_elec)
            if mode is FunctionalMode.X_ONLY:
                correlated = x_only
            else:
                correlated = solve_term(Z, term, grid_spec, mode, settings, n_elec)
        except ConfinedKSError as e:
            logger.warning("correlation scan %s r_c=%g failed: %s", term, r_c, e)
            return CorrelationPoint(term, mode, grid_spec.r_c, "FAILED")
        return CorrelationPoint(
            term_label=correlated.term_label,
            mode=mode,
            r_c=grid_spec.r_c,
            status="OK",
            E_c=correlated.energy.E_c,
            E_x_only=x_only.E_total,
            E_correlated=correlated.E_total,
        )

    return ordered_map(run, points, jobs)
