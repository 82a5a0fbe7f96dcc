import math
import threading
import time

import numpy as np
import pytest

from pyconfinedks.helpers import format_number, format_radius, ordered_map, serialize_value
from pyconfinedks.runner import ComparisonRow, ReferenceRow, compare, load_reference, reference_catalog
from pyconfinedks.state import CorrelationPoint, EnergyComponents, MomentSet, ProfileTable, TermEnergy
from pyconfinedks.types import FunctionalMode, Spin


NUMBERS = [
    (None, ""),
    (True, "true"),
    (3, "3"),
    (np.int64(7), "7"),
    (0.1, "0.1000000000"),
    (-2.86164, "-2.8616400000"),
    (float("nan"), "nan"),
    (float("inf"), "inf"),
    (-math.inf, "-inf"),
    (FunctionalMode.XC_LYP, "xc_lyp"),
]

RADII = [(1.0, "1"), (0.5, "0.5"), (40.0, "40"), (4.45, "4.45")]


# ===== HELPERS =====

@pytest.mark.parametrize("value,expected", NUMBERS)
def test_format_number(value, expected):
    assert format_number(value) == expected


@pytest.mark.parametrize("value,expected", RADII)
def test_format_radius(value, expected):
    assert format_radius(value) == expected


def test_serialize_value():
    assert serialize_value(Spin.UP) == "up"
    assert serialize_value(np.float64(1.5)) == 1.5
    assert serialize_value((Spin.UP, np.int32(2))) == ["up", 2]


def test_ordered_map_keeps_input_order():
    def slow_square(x):
        time.sleep(0.01 * (5 - x))
        return x * x

    assert ordered_map(slow_square, range(5), jobs=4) == [0, 1, 4, 9, 16]


def test_ordered_map_inline():
    seen = []
    ordered_map(lambda x: seen.append(threading.get_ident()), range(3), jobs=1)
    assert set(seen) == {threading.get_ident()}


def test_ordered_map_empty():
    assert ordered_map(abs, [], jobs=4) == []


# ===== STATE =====

def test_energy_components():
    a = EnergyComponents(T=2.0, V_en=-5.0, E_H=1.5, E_x=-0.75, E_c=-0.05)
    assert a.V_ee == pytest.approx(0.7)
    assert a.E_total == pytest.approx(-2.3)
    diff = a - a
    assert all(v == 0.0 for v in diff.to_dict().values())
    assert list(a.to_dict()) == ["T", "V_en", "E_H", "E_x", "E_c", "V_ee", "E_total"]


def test_term_energy_lookup_by_name():
    energy = TermEnergy("1s2s_3S", {FunctionalMode.X_ONLY: 0.567})
    assert energy["x_only"] == 0.567
    assert energy.to_dict() == {"term": "1s2s_3S", "energies": {"x_only": 0.567}}


def test_moment_set_record():
    m = MomentSet("1s2_1S", FunctionalMode.X_ONLY, 1.0, {-1: 5.9, 1: 0.88})
    assert m.to_dict() == {"term": "1s2_1S", "mode": "x_only", "r_c": 1.0, "m_-1": 5.9, "m_1": 0.88}


def test_profile_rows():
    table = ProfileTable(np.array([0.0, 1.0]), {"a": np.array([1.0, 2.0]), "b": np.array([3.0, 4.0])})
    assert table.header == ["r", "a", "b"]
    assert list(table.rows()) == [[0.0, 1.0, 3.0], [1.0, 2.0, 4.0]]


def test_failed_correlation_point():
    point = CorrelationPoint("1s2_1S", FunctionalMode.XC_WIGNER, 1.0, "FAILED")
    assert math.isnan(point.abs_E_c) and math.isnan(point.gap)
    assert point.to_dict()["status"] == "FAILED"


# ===== REFERENCES =====

def test_catalog_lists_bundled_tables():
    catalog = reference_catalog()
    assert set(catalog) == {"table1", "table2", "table3", "table4", "table5", "table7", "crossing"}
    assert catalog["table1"] == 0.001


@pytest.mark.parametrize("name", ["table1", "table2", "table3", "table4", "table5", "table7", "crossing"])
def test_bundled_tables_load(name):
    rows = load_reference(name)
    assert rows
    assert all(row.tolerance is not None and row.tolerance > 0 for row in rows)


def test_bundled_free_limit_rows():
    rows = load_reference("table1")
    free = [r for r in rows if r.r_c == 40.0 and r.mode is FunctionalMode.X_ONLY]
    assert len(free) == 1
    assert free[0].value == pytest.approx(-2.86164)


def test_reference_row_overrides_default():
    rows = load_reference("table1")
    tolerances = {r.mode: r.tolerance for r in rows if r.r_c == 1.0}
    assert tolerances[FunctionalMode.X_ONLY] == 0.001
    assert tolerances[FunctionalMode.XC_WIGNER] == 0.002


def test_malformed_reference(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("system,term,mode,r_c,quantity,value\nHe,1s2_1S,x_only,abc,E_total,1\n", encoding="utf-8")
    with pytest.raises(ValueError, match="line 2"):
        load_reference(path)


def test_reference_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("system,term\nHe,1s2_1S\n", encoding="utf-8")
    with pytest.raises(ValueError, match="lacks columns"):
        load_reference(path)


def test_comparison_row_deviation():
    row = ComparisonRow("He", "1s2_1S", FunctionalMode.X_ONLY, 1.0, "E_total", 1.0615, 1.06121, 1e-3)
    assert row.abs_dev == pytest.approx(2.9e-4)
    assert row.passed
    assert row.record()[-1] == "PASS"


def test_zero_reference_relative_deviation():
    row = ComparisonRow("He", "x", FunctionalMode.X_ONLY, 1.0, "E_c", 0.1, 0.0, 1e-3)
    assert row.rel_dev == math.inf
    assert not row.passed


def test_global_tolerance_override():
    ref = [ReferenceRow("He", "1s2_1S", FunctionalMode.X_ONLY, 1.0, "E_total", 1.0, 1e-6)]
    computed = {("He", "1s2_1S", FunctionalMode.X_ONLY, 1.0, "E_total"): 1.001}
    assert not compare(computed, ref).passed
    assert compare(computed, ref, tolerance=0.01).passed
