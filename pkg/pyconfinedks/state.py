from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np

from .helpers import serialize_value
from .types import DENSITY_FLOOR, ORBITAL_LETTERS, FunctionalMode, Spin


def _clean(d: dict) -> dict:
    """Remove keys where value is None."""
    return {k: v for k, v in d.items() if v is not None}


# ===== ORBITALS =====

@dataclass(frozen=True, eq=False)
class Orbital:
    n: int
    l: int
    spin: Spin
    occupancy: float
    eps: float
    u: np.ndarray

    @property
    def label(self) -> str:
        return f"{self.n}{ORBITAL_LETTERS[self.l]}"

    def full(self) -> np.ndarray:
        out = np.zeros(len(self.u) + 2)
        out[1:-1] = self.u
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "l": self.l,
            "spin": self.spin.value,
            "occupancy": self.occupancy,
            "eps": self.eps,
        }


# ===== DENSITY =====

@dataclass(frozen=True, eq=False)
class DensityField:
    """Spherically averaged density on the full grid, with its spin parts and derivatives."""

    rho_up: np.ndarray
    rho_down: np.ndarray
    grad_up: np.ndarray
    grad_down: np.ndarray
    lap_up: np.ndarray
    lap_down: np.ndarray
    n_elec: float

    @classmethod
    def from_spin_densities(cls, rho_up: np.ndarray, rho_down: np.ndarray, grid: Any) -> "DensityField":
        rho_up = np.asarray(rho_up, dtype=float)
        rho_down = np.asarray(rho_down, dtype=float)
        n_elec = float(grid.volume_weights @ (rho_up + rho_down))
        return cls(
            rho_up=rho_up,
            rho_down=rho_down,
            grad_up=grid.D1 @ rho_up,
            grad_down=grid.D1 @ rho_down,
            lap_up=grid.laplacian @ rho_up,
            lap_down=grid.laplacian @ rho_down,
            n_elec=n_elec,
        )

    @property
    def rho(self) -> np.ndarray:
        return self.rho_up + self.rho_down

    @property
    def grad(self) -> np.ndarray:
        return self.grad_up + self.grad_down

    @property
    def lap(self) -> np.ndarray:
        return self.lap_up + self.lap_down

    def spin(self, spin: Spin) -> np.ndarray:
        return self.rho_up if spin is Spin.UP else self.rho_down

    def floored(self) -> tuple[np.ndarray, np.ndarray]:
        return np.maximum(self.rho_up, DENSITY_FLOOR), np.maximum(self.rho_down, DENSITY_FLOOR)


# ===== POTENTIALS =====

@dataclass(frozen=True, eq=False)
class PotentialSet:
    """Potential terms on the full grid. v_en and v_eff hold -inf at r = 0."""

    r: np.ndarray
    v_en: np.ndarray
    v_h: np.ndarray
    v_x: dict
    v_c: dict

    @property
    def v_eff(self) -> dict:
        return {s: self.v_en + self.v_h + self.v_x[s] + self.v_c[s] for s in Spin}

    def self_consistent(self, spin: Spin) -> np.ndarray:
        """v_H + v_x + v_c of one spin channel at the interior points."""
        return (self.v_h + self.v_x[spin] + self.v_c[spin])[1:-1]


# ===== ENERGIES =====

@dataclass(frozen=True)
class EnergyComponents:
    T: float
    V_en: float
    E_H: float
    E_x: float
    E_c: float = 0.0

    @property
    def V_ee(self) -> float:
        return self.E_H + self.E_x + self.E_c

    @property
    def E_total(self) -> float:
        return self.T + self.V_en + self.E_H + self.E_x + self.E_c

    def combine(self, other: "EnergyComponents", a: float, b: float) -> "EnergyComponents":
        """Component-wise a * self + b * other."""
        return EnergyComponents(**{
            f.name: a * getattr(self, f.name) + b * getattr(other, f.name) for f in fields(self)
        })

    def __sub__(self, other: "EnergyComponents") -> "EnergyComponents":
        return self.combine(other, 1.0, -1.0)

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "V_en": self.V_en,
            "E_H": self.E_H,
            "E_x": self.E_x,
            "E_c": self.E_c,
            "V_ee": self.V_ee,
            "E_total": self.E_total,
        }


@dataclass(frozen=True, eq=False)
class SCFResult:
    term_label: str
    Z: int
    mode: FunctionalMode
    r_c: float
    orbitals: tuple
    density: DensityField
    potentials: PotentialSet
    energy: EnergyComponents
    iterations: int
    history: tuple = ()

    @property
    def E_total(self) -> float:
        return self.energy.E_total

    def orbital(self, label: str, spin: Spin = Spin.UP) -> Orbital:
        for orb in self.orbitals:
            if orb.label == label and orb.spin is spin:
                return orb
        raise KeyError(f"No occupied {label} {spin.value} orbital in {self.term_label}")

    def to_dict(self) -> dict:
        return {
            "term": self.term_label,
            "Z": self.Z,
            "mode": self.mode.value,
            "r_c": self.r_c,
            "iterations": self.iterations,
            "energy": self.energy.to_dict(),
            "orbitals": [o.to_dict() for o in self.orbitals],
        }


@dataclass(frozen=True)
class TermEnergy:
    term_label: str
    energies: dict = field(default_factory=dict)

    def __getitem__(self, mode: Any) -> float:
        return self.energies[FunctionalMode(mode)]

    def to_dict(self) -> dict:
        return {
            "term": self.term_label,
            "energies": {serialize_value(k): v for k, v in self.energies.items()},
        }


@dataclass(frozen=True, eq=False)
class TermSolution:
    """Energy of one term at one (mode, r_c), with the determinant SCFs it was assembled from."""

    term_label: str
    Z: int
    mode: FunctionalMode
    r_c: float
    energy: EnergyComponents
    determinants: dict = field(default_factory=dict)

    @property
    def E_total(self) -> float:
        return self.energy.E_total

    @property
    def iterations(self) -> int:
        return sum(r.iterations for r in self.determinants.values())

    @property
    def primary(self) -> SCFResult:
        """Determinant whose orbitals stand for the term; the M_S = 0 one for a sum-rule singlet."""
        return list(self.determinants.values())[-1]

    def to_dict(self) -> dict:
        return {
            "term": self.term_label,
            "Z": self.Z,
            "mode": self.mode.value,
            "r_c": self.r_c,
            "iterations": self.iterations,
            "energy": self.energy.to_dict(),
            "determinants": {serialize_value(k): v.to_dict() for k, v in self.determinants.items()},
        }


# ===== OBSERVABLES =====

@dataclass(frozen=True)
class MomentSet:
    term_label: str
    mode: FunctionalMode
    r_c: float
    values: dict
    unit_normalized: bool = False
    system: str | None = None

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def to_dict(self) -> dict:
        d = _clean({
            "system": self.system,
            "term": self.term_label,
            "mode": self.mode.value,
            "r_c": self.r_c,
        })
        for k, v in self.values.items():
            d[f"m_{k}"] = v
        if self.unit_normalized:
            d["unit_normalized"] = True
        return d


@dataclass(frozen=True, eq=False)
class ProfileTable:
    """Columns sampled on one radial mesh, in insertion order."""

    r: np.ndarray
    columns: dict

    @property
    def header(self) -> list[str]:
        return ["r", *self.columns]

    def rows(self):
        for i, r in enumerate(self.r):
            yield [float(r), *(float(col[i]) for col in self.columns.values())]


@dataclass(frozen=True)
class CorrelationPoint:
    term_label: str
    mode: FunctionalMode
    r_c: float
    status: str
    E_c: float = float("nan")
    E_x_only: float = float("nan")
    E_correlated: float = float("nan")

    @property
    def abs_E_c(self) -> float:
        return abs(self.E_c)

    @property
    def gap(self) -> float:
        """Correlated minus exchange-only total energy."""
        return self.E_correlated - self.E_x_only

    def to_dict(self) -> dict:
        return {
            "term": self.term_label,
            "mode": self.mode.value,
            "r_c": self.r_c,
            "status": self.status,
            "E_c": self.E_c,
            "abs_E_c": self.abs_E_c,
            "E_x_only": self.E_x_only,
            "E_correlated": self.E_correlated,
            "gap": self.gap,
        }
