import csv
import json
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from pydantic import TypeAdapter, ValidationError

from .config import JobConfig
from .errors import ConfinedKSError
from .grid import CavityRadius, build_operators
from .helpers import format_number, format_radius, ordered_map
from .observables import moments, potential_profiles, radial_distribution
from .scf import solve_term
from .state import MomentSet, ProfileTable, TermSolution
from .types import MOMENT_ORDERS, FunctionalMode

logger = logging.getLogger(__name__)

ENERGY_COLUMNS = [
    "system", "term", "mode", "r_c", "status", "iterations",
    "T", "V_en", "E_H", "E_x", "E_c", "V_ee", "E_total",
]
MOMENT_COLUMNS = ["system", "term", "mode", "r_c", *(f"m_{k}" for k in MOMENT_ORDERS)]
REPORT_COLUMNS = [
    "system", "term", "mode", "r_c", "quantity",
    "computed", "reference", "abs_dev", "rel_dev", "tolerance", "status",
]
REFERENCE_COLUMNS = ["system", "term", "mode", "r_c", "quantity", "value", "tolerance"]

PAIR_QUANTITIES = {"dE": "E_total", "dT": "T", "dV_en": "V_en", "dV_ee": "V_ee"}
DEFAULT_TOLERANCE = 1e-3

_RADIUS = TypeAdapter(CavityRadius)


# ===== TYPES =====

@dataclass(frozen=True, eq=False)
class ScanRow:
    system: str
    term: str
    mode: FunctionalMode
    r_c: float
    status: str
    solution: TermSolution | None = None
    moments: MomentSet | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "OK"

    def values(self) -> dict:
        """quantity -> value for every number this point produced."""
        if not self.ok:
            return {}
        out = dict(self.solution.energy.to_dict())
        if self.moments is not None:
            out.update({f"m_{k}": v for k, v in self.moments.values.items()})
        return out

    def energy_record(self) -> list:
        head = [self.system, self.term, self.mode.value, format_radius(self.r_c), self.status]
        if not self.ok:
            return head + [""] * (len(ENERGY_COLUMNS) - len(head))
        e = self.solution.energy.to_dict()
        return head + [str(self.solution.iterations)] + [
            format_number(e[k]) for k in ENERGY_COLUMNS[6:]
        ]


@dataclass(frozen=True)
class ReferenceRow:
    system: str
    term: str
    mode: FunctionalMode
    r_c: float
    quantity: str
    value: float
    tolerance: float | None = None


@dataclass(frozen=True)
class ComparisonRow:
    system: str
    term: str
    mode: FunctionalMode
    r_c: float
    quantity: str
    computed: float
    reference: float
    tolerance: float

    @property
    def abs_dev(self) -> float:
        return abs(self.computed - self.reference)

    @property
    def rel_dev(self) -> float:
        return self.abs_dev / abs(self.reference) if self.reference else math.inf

    @property
    def passed(self) -> bool:
        return self.abs_dev <= self.tolerance

    def record(self) -> list:
        return [
            self.system, self.term, self.mode.value, format_radius(self.r_c), self.quantity,
            format_number(self.computed), format_number(self.reference),
            format_number(self.abs_dev), format_number(self.rel_dev),
            format_number(self.tolerance), "PASS" if self.passed else "FAIL",
        ]


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple = ()
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> list:
        return [row for row in self.rows if not row.passed]

    def summary(self) -> str:
        return (
            f"{len(self.rows) - len(self.failures)}/{len(self.rows)} within tolerance"
            f" ({self.skipped} reference rows without a computed value)"
        )


# ===== SCAN =====

def run_point(config: JobConfig, term: str, mode: FunctionalMode, r_c: float) -> ScanRow:
    system = config.system.label
    spec = config.grid_for(r_c)
    try:
        solution = solve_term(config.system.Z, term, spec, mode, config.scf, config.system.n_elec)
    except ConfinedKSError as e:
        logger.error("%s %s [%s] r_c=%g FAILED: %s", system, term, mode.value, spec.r_c, e)
        return ScanRow(system, term, mode, spec.r_c, "FAILED", error=str(e))

    moment_set = moments(solution, build_operators(spec), system=system)
    logger.info("%s %s [%s] r_c=%s: E = %.8f", system, term, mode.value,
                format_radius(spec.r_c), solution.E_total)
    return ScanRow(system, term, mode, spec.r_c, "OK", solution, moment_set)


def scan_points(config: JobConfig, radii: Iterable[float] | None = None) -> list:
    radii = config.radii if radii is None else tuple(radii)
    return [(term, mode, r_c) for term in config.terms for mode in config.modes for r_c in radii]


def run_scan(config: JobConfig, jobs: int | None = None, radii: Iterable[float] | None = None) -> list[ScanRow]:
    """Every (term, mode, r_c) point of the config, in input order."""
    points = scan_points(config, radii)
    jobs = jobs or config.jobs
    logger.info("scanning %d points with %d worker(s)", len(points), jobs)
    return ordered_map(lambda p: run_point(config, *p), points, jobs)


# ===== CSV =====

def _write_csv(path: Path, header: list, records: Iterable[list]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(records)
    return path


def write_energies(rows: Iterable[ScanRow], path: Path) -> Path:
    return _write_csv(path, ENERGY_COLUMNS, (row.energy_record() for row in rows))


def write_moments(rows: Iterable[ScanRow], path: Path) -> Path:
    records = []
    for row in rows:
        if row.ok and row.moments is not None:
            d = row.moments.to_dict()
            records.append([row.system, row.term, row.mode.value, format_radius(row.r_c)]
                           + [format_number(d[c]) for c in MOMENT_COLUMNS[4:]])
    return _write_csv(path, MOMENT_COLUMNS, records)


def write_profile(table: ProfileTable, path: Path) -> Path:
    records = ([format_number(v) for v in values] for values in table.rows())
    return _write_csv(path, table.header, records)


def write_report(report: ComparisonReport, path: Path) -> Path:
    return _write_csv(path, REPORT_COLUMNS, (row.record() for row in report.rows))


def read_energies(path: str | Path) -> dict:
    """Computed values keyed like computed_values() from an energies CSV."""
    out = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            if rec.get("status") != "OK":
                continue
            key = (rec["system"], rec["term"], FunctionalMode(rec["mode"]), _radius_key(rec["r_c"]))
            for q in ENERGY_COLUMNS[6:]:
                out[key + (q,)] = float(rec[q])
    return out


# ===== REFERENCES =====

def _radius_key(value) -> float:
    return round(_RADIUS.validate_python(value), 9)


def _reference_path(name: str | Path) -> Path | None:
    path = Path(name)
    if path.suffix != ".csv":
        return None
    if not path.exists():
        raise ValueError(f"Reference file not found: {path}")
    return path


def reference_catalog() -> dict:
    text = (resources.files(__package__) / "references" / "catalog.csv").read_text(encoding="utf-8")
    return {rec["table"]: float(rec["default_tolerance"]) for rec in csv.DictReader(text.splitlines())}


def load_reference(name: str | Path) -> list[ReferenceRow]:
    """Rows of a bundled table ('table1', ...) or of a reference CSV path."""
    path = _reference_path(name)
    if path is not None:
        text = path.read_text(encoding="utf-8")
        default = None
    else:
        catalog = reference_catalog()
        if str(name) not in catalog:
            raise ValueError(
                f"Unknown reference '{name}': not a CSV file nor one of {', '.join(catalog)}"
            )
        text = (resources.files(__package__) / "references" / f"{name}.csv").read_text(encoding="utf-8")
        default = catalog[str(name)]

    reader = csv.DictReader(text.splitlines())
    missing = set(REFERENCE_COLUMNS[:-1]) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"Reference '{name}' lacks columns: {', '.join(sorted(missing))}")

    rows = []
    for lineno, rec in enumerate(reader, start=2):
        try:
            tol = rec.get("tolerance") or None
            rows.append(ReferenceRow(
                system=rec["system"],
                term=rec["term"],
                mode=FunctionalMode(rec["mode"]),
                r_c=_radius_key(rec["r_c"]),
                quantity=rec["quantity"],
                value=float(rec["value"]),
                tolerance=float(tol) if tol else default,
            ))
        except (ValueError, ValidationError) as e:
            raise ValueError(f"[{name} line {lineno}] {e}") from e
    return rows


def computed_values(rows: Iterable[ScanRow]) -> dict:
    out = {}
    for row in rows:
        key = (row.system, row.term, row.mode, round(row.r_c, 9))
        for quantity, value in row.values().items():
            out[key + (quantity,)] = value
    return out


def _lookup(computed: dict, ref: ReferenceRow) -> float | None:
    key = (ref.system, ref.term, ref.mode, ref.r_c, ref.quantity)
    if key in computed:
        return computed[key]
    if "-" in ref.term and ref.quantity in PAIR_QUANTITIES:
        term_a, _, term_b = ref.term.partition("-")
        quantity = PAIR_QUANTITIES[ref.quantity]
        a = computed.get((ref.system, term_a, ref.mode, ref.r_c, quantity))
        b = computed.get((ref.system, term_b, ref.mode, ref.r_c, quantity))
        if a is not None and b is not None:
            return a - b
    return None


def compare(
    computed: dict, reference: Iterable[ReferenceRow], tolerance: float | None = None
) -> ComparisonReport:
    """Match computed values against reference rows; tolerance overrides every row's own."""
    rows = []
    skipped = 0
    for ref in reference:
        value = _lookup(computed, ref)
        if value is None:
            skipped += 1
            continue
        tol = tolerance if tolerance is not None else (ref.tolerance or DEFAULT_TOLERANCE)
        rows.append(ComparisonRow(
            ref.system, ref.term, ref.mode, ref.r_c, ref.quantity, value, ref.value, tol,
        ))
    if not rows:
        raise ValueError("No reference row matches a computed value")
    return ComparisonReport(rows=tuple(rows), skipped=skipped)


# ===== JOBS =====

@dataclass
class JobOutcome:
    rows: list = field(default_factory=list)
    report: ComparisonReport | None = None
    files: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if any(not row.ok for row in self.rows):
            return 1
        if self.report is not None and not self.report.passed:
            return 2
        return 0


def execute(
    config: JobConfig,
    out: Path,
    jobs: int | None = None,
    tolerance: float | None = None,
    single: bool = False,
) -> JobOutcome:
    """Run a scan (or the first radius only when single), write CSVs, compare if a reference is set."""
    radii = config.radii[:1] if single else config.radii
    rows = run_scan(config, jobs, radii)
    outcome = JobOutcome(rows=rows)
    outcome.files.append(write_energies(rows, out / "energies.csv"))
    outcome.files.append(write_moments(rows, out / "moments.csv"))

    if config.reference and not any(row.ok for row in rows):
        logger.error("every point FAILED, skipping comparison against %s", config.reference)
    elif config.reference:
        report = compare(computed_values(rows), load_reference(config.reference),
                         tolerance if tolerance is not None else config.tolerance)
        outcome.report = report
        outcome.files.append(write_report(report, out / "comparison.csv"))
        logger.info("comparison against %s: %s", config.reference, report.summary())
    return outcome


def _stem(row: ScanRow) -> str:
    return f"{row.system}_{row.term}_{row.mode.value}_rc{format_radius(row.r_c)}"


def emit_density(config: JobConfig, out: Path, jobs: int | None = None) -> JobOutcome:
    rows = run_scan(config, jobs)
    outcome = JobOutcome(rows=rows)
    for row in rows:
        if not row.ok:
            continue
        grid = build_operators(config.grid_for(row.r_c))
        collocated, uniform = radial_distribution(row.solution, grid)
        outcome.files.append(write_profile(collocated, out / f"density_{_stem(row)}.csv"))
        outcome.files.append(write_profile(uniform, out / f"density_{_stem(row)}_uniform.csv"))
    return outcome


def emit_potentials(config: JobConfig, out: Path, jobs: int | None = None) -> JobOutcome:
    rows = run_scan(config, jobs)
    outcome = JobOutcome(rows=rows)
    for row in rows:
        if row.ok:
            table = potential_profiles(row.solution)
            outcome.files.append(write_profile(table, out / f"potentials_{_stem(row)}.csv"))
    return outcome


def summary_json(rows: Iterable[ScanRow]) -> str:
    data = []
    for r in rows:
        record = {"system": r.system, "term": r.term, "mode": r.mode.value, "r_c": r.r_c, "status": r.status}
        record.update(r.solution.to_dict() if r.ok else {"error": r.error})
        data.append(record)
    return json.dumps(data, indent=2)
