import csv

import pytest

from kendep.errors import ConfigurationError, DomainError
from kendep.reference import BIOMARKER_PAIRS, BIOMARKER_TRIPLES, INDEX_TABLES, POWER_NON_NORMAL
from kendep.reproduce import TABLE_IDS, CellResult, ReproductionResult, reproduce_table


def test_table_ids():
    assert TABLE_IDS[:2] == ("T1", "T2")
    assert sum(t.startswith("T3") for t in TABLE_IDS) == 10
    assert sum(t.startswith("T4") for t in TABLE_IDS) == 8
    assert sum(t.startswith("T5") for t in TABLE_IDS) == 8
    assert set(INDEX_TABLES) < set(TABLE_IDS)


def test_cell_tolerance_is_inclusive():
    assert CellResult("T", "r", "c", 1.0, 1.5, 0.5).passed
    assert not CellResult("T", "r", "c", 1.0, 1.51, 0.5).passed
    assert CellResult("T", "r", "c", 1.0, 0.9, 0.2).to_row()["difference"] == pytest.approx(-0.1)


def test_write_round_trip(tmp_path):
    cells = [CellResult("TX", "a", "1", 0.1, 0.1 + 1e-17, 0.01), CellResult("TX", "a", "2", 0.2, 0.5, 0.01)]
    result = ReproductionResult("TX", ["row", "1", "2"], [["a", 0.1, 0.5]], cells, {"r": 3})
    paths = result.write(tmp_path / "out")
    with open(paths["comparison"], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["passed"] for r in rows] == ["True", "False"]
    assert float(rows[1]["reproduced"]) == 0.5
    summary = result.summary()
    assert not summary["passed"] and summary["passed_cells"] == 1 and len(summary["failures"]) == 1


def test_unknown_table_and_scale():
    with pytest.raises(ConfigurationError):
        reproduce_table("T9")
    with pytest.raises(DomainError):
        reproduce_table("T3a", scale=0.0)


def test_reference_data_shapes():
    assert len(BIOMARKER_PAIRS) == 6 and len(BIOMARKER_TRIPLES) == 4
    assert all(len(rates) == 9 for _, _, rates in POWER_NON_NORMAL.values())


def test_table6_layout():
    result = reproduce_table("T6", seed=0)
    by_key = {(c.row, c.column): c for c in result.cells}
    assert by_key[("(AST,ALT)", "I_hat")].passed
    assert by_key[("(AST,ALT)", "tau_hat")].passed
    assert by_key[("(DB,AST,ALT)", "I_hat")].passed
    assert by_key[("(DB,AST,ALT,AP)", "I_hat")].passed
    assert len(result.rows) == 11
    assert result.parameters["phi_4"]["source"] == "calibrated"


def test_table1_small_scale():
    result = reproduce_table("T1", scale=0.001, seed=1)
    assert result.parameters["r"] == 100
    inf_cells = [c for c in result.cells if c.column == "inf"]
    assert len(inf_cells) == 3 and all(c.passed for c in inf_cells)
    assert len(result.cells) == 3 * 12


def test_index_table_small_scale():
    result = reproduce_table("T3b", scale=0.02, seed=2)
    assert result.parameters["r"] == 20
    assert result.header == ["estimator", "100", "200", "500", "1000"]
    I = result.rows[0][1:]
    assert all(a < b for a, b in zip(I, I[1:]))


def test_deterministic():
    a = reproduce_table("T5a", scale=0.01, seed=5)
    b = reproduce_table("T5a", scale=0.01, seed=5)
    assert [c.reproduced for c in a.cells] == [c.reproduced for c in b.cells]
