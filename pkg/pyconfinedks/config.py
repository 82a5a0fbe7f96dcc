from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from .configuration import build_configuration, resolve_system
from .grid import CavityRadius, GridSpec
from .types import (
    DEFAULT_MAP_LENGTH,
    DEFAULT_MAX_ITER,
    DEFAULT_MIXING,
    DEFAULT_N_R,
    ENERGY_TOLERANCE,
    MIN_CAVITY_RADIUS,
    MIN_MIXING,
    POTENTIAL_TOLERANCE,
    FunctionalMode,
)


class SCFSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mixing: float = Field(DEFAULT_MIXING, gt=0, le=1)
    max_iter: int = Field(DEFAULT_MAX_ITER, ge=1)
    energy_tol: float = Field(ENERGY_TOLERANCE, gt=0)
    potential_tol: float = Field(POTENTIAL_TOLERANCE, gt=0)
    min_mixing: float = Field(MIN_MIXING, gt=0)
    lyp_spin: Literal["resolved", "total"] = "resolved"


class SystemSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str | None = None
    Z: int = Field(..., ge=1, le=4)
    n_elec: int = Field(..., ge=1)

    @property
    def label(self) -> str:
        return self.name or f"Z{self.Z}"


class JobConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    system: SystemSpec
    terms: tuple[str, ...] = Field(..., min_length=1)
    modes: tuple[FunctionalMode, ...] = (FunctionalMode.X_ONLY,)
    grid: GridSpec
    radii: tuple[CavityRadius, ...] = Field(..., min_length=1)
    scf: SCFSettings = SCFSettings()
    out: Path | None = None
    reference: str | None = None
    tolerance: float | None = Field(None, gt=0)
    jobs: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_consistency(self) -> "JobConfig":
        for term in self.terms:
            build_configuration(self.system.Z, term, n_elec=self.system.n_elec)
        for r_c in self.radii:
            if r_c < MIN_CAVITY_RADIUS:
                raise ValueError(f"r_c = {r_c:g} is below the {MIN_CAVITY_RADIUS} bohr floor")
        return self

    def grid_for(self, r_c: float) -> GridSpec:
        return self.grid.with_radius(r_c)


# ===== INI PARSING =====

_KEYS = {
    "system": {"name": "name", "z": "Z", "n": "n_elec", "n_elec": "n_elec"},
    "grid": {"n_r": "n_r", "l": "L"},
    "run": {
        "term": "terms", "terms": "terms",
        "mode": "modes", "modes": "modes",
        "rc": "radii", "r_c": "radii",
        "out": "out", "reference": "reference", "tolerance": "tolerance", "jobs": "jobs",
        "mixing": "mixing", "max_iter": "max_iter", "energy_tol": "energy_tol",
        "potential_tol": "potential_tol", "min_mixing": "min_mixing", "lyp_spin": "lyp_spin",
    },
}

_LIST_ITEMS = {
    "terms": TypeAdapter(str),
    "modes": TypeAdapter(FunctionalMode),
    "radii": TypeAdapter(CavityRadius),
}

_SCF_KEYS = set(SCFSettings.model_fields)


def _split_list(key: str, raw: str, lineno: int) -> list:
    adapter = _LIST_ITEMS[key]
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise ValueError(f"[line {lineno}] '{key}' needs at least one value")
    out = []
    for item in items:
        try:
            out.append(adapter.validate_python(item))
        except ValidationError as e:
            errors = e.errors()
            msg = errors[0]["msg"] if errors else str(e)
            raise ValueError(f"[line {lineno}] invalid {key} item {item!r}: {msg}") from e
    return out


def _read_sections(text: str) -> dict:
    sections: dict = {name: {} for name in _KEYS}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in _KEYS:
                raise ValueError(f"[line {lineno}] unknown section [{current}]")
            continue
        if "=" not in line:
            raise ValueError(f"[line {lineno}] expected key = value, got {line!r}")
        if current is None:
            raise ValueError(f"[line {lineno}] key outside of a section")

        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        field_name = _KEYS[current].get(key.lower())
        if field_name is None:
            raise ValueError(f"[line {lineno}] unknown key '{key}' in [{current}]")
        if field_name in sections[current]:
            raise ValueError(f"[line {lineno}] duplicate key '{key}' in [{current}]")
        if field_name in _LIST_ITEMS:
            sections[current][field_name] = _split_list(field_name, value, lineno)
        else:
            sections[current][field_name] = value
    return sections


def _system_data(raw: dict) -> dict:
    data = dict(raw)
    if "Z" not in data and "name" in data:
        data["Z"] = resolve_system(data["name"])
    return data


def parse_config(text: str) -> JobConfig:
    """Validated JobConfig from the [system] / [grid] / [run] key = value format."""
    if not isinstance(text, str):
        raise TypeError(f"Config text must be str, got {type(text).__name__}")

    sections = _read_sections(text)
    run = sections["run"]
    radii = run.get("radii")
    if not radii:
        raise ValueError("[run] at least one rc value is required")

    data: dict[str, Any] = {
        "system": _system_data(sections["system"]),
        "grid": {
            "n_r": sections["grid"].get("n_r", DEFAULT_N_R),
            "L": sections["grid"].get("L", DEFAULT_MAP_LENGTH),
            "r_c": radii[0],
        },
        "radii": radii,
        "scf": {k: v for k, v in run.items() if k in _SCF_KEYS},
    }
    for key in ("terms", "modes", "out", "reference", "tolerance", "jobs"):
        if key in run:
            data[key] = run[key]

    try:
        return JobConfig.model_validate(data)
    except ValidationError as e:
        errors = e.errors()
        if not errors:
            raise ValueError(str(e)) from e
        loc = ".".join(str(p) for p in errors[0]["loc"]) or "config"
        msg = errors[0]["msg"]
        raise ValueError(f"[{loc}] {msg}") from e


def load_config(path: str | Path) -> JobConfig:
    path = Path(path)
    try:
        return parse_config(path.read_text(encoding="utf-8"))
    except ValueError as e:
        raise ValueError(f"[{path.name}] {e}") from e
