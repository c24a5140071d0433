import numpy as np
import pytest

from chartgen.errors import TableError
from chartgen.tables import (classify_cells, decompose_table, impute_missing,
                             impute_table, is_missing, load_table,
                             merge_tables, parse_number)


def csv(text: str) -> bytes:
    return text.strip().encode("utf-8") + b"\n"


BASIC = csv("""
Region,Alpha,Beta
North,1.5,10
South,2.5,20
East,3.5,30
""")


def test_load_basic_shape():
    table = load_table(BASIC, name="basic")
    assert table.name == "basic"
    assert table.label_header == "Region"
    assert table.row_labels == ("North", "South", "East")
    assert [c.header for c in table.columns] == ["Alpha", "Beta"]
    assert all(c.kind == "numeric" for c in table.columns)
    assert table.column("Alpha").values == (1.5, 2.5, 3.5)


def test_load_rejects_malformed_inputs():
    with pytest.raises(TableError):
        load_table(b"")  # no header
    with pytest.raises(TableError):
        load_table(csv("OnlyLabels\nrow1\nrow2"))  # no data column
    with pytest.raises(TableError):
        load_table(csv("R,A,B\nx,1,2\ny,3"))  # ragged row
    with pytest.raises(TableError):
        load_table(csv("R,A,A\nx,1,2"))  # duplicate headers
    with pytest.raises(TableError):
        load_table(csv("R,A\nx,1\nx,2"))  # duplicate row labels
    with pytest.raises(TableError):
        load_table(csv("R,A"))  # header only
    with pytest.raises(TableError):
        load_table("R,A\nx,1".encode("utf-16"))  # not UTF-8


def test_parse_number_tolerates_separators_and_rejects_junk():
    assert parse_number("1,234.5") == 1234.5
    assert parse_number(" -3 ") == -3.0
    assert parse_number("12%") is None
    assert parse_number("nan") is None
    assert parse_number("inf") is None


def test_missing_markers():
    for cell in ("", "  ", "n/a", "N/A", "na", "NULL"):
        assert is_missing(cell)
    assert not is_missing("0")
    assert not is_missing("none at all")


def test_classify_serial_and_hex_columns_rejected():
    assert classify_cells(["0x3F21A8", "0x40C2E1", "0xFF"]) == "rejected"
    assert classify_cells(["deadbeef01", "FEED0123CAFE"]) == "rejected"
    assert classify_cells(["SN-48213-KX", "SN-55107-QD"]) == "rejected"
    # below half identifier-like: not rejected
    assert classify_cells(["SN-48213-KX", "plain", "words", "here"]) \
        == "categorical"


def test_classify_numeric_fraction_boundary():
    # 3 of 5 parse (0.6): numeric; 2 of 5: categorical
    assert classify_cells(["1", "2", "3", "x", "y"]) == "numeric"
    assert classify_cells(["1", "2", "x", "y", "z"]) == "categorical"
    # missing cells do not count against the fraction
    assert classify_cells(["1", "n/a", "2", ""]) == "numeric"
    assert classify_cells([""]) == "categorical"


def test_aggregate_row_dropped():
    table = load_table(csv("""
R,A,B
x,1.0,10.0
y,2.0,20.0
total,3.0,30.0
"""))
    assert table.row_labels == ("x", "y")
    assert table.column("A").values == (1.0, 2.0)


def test_aggregate_requires_every_numeric_column():
    table = load_table(csv("""
R,A,B
x,1.0,10.0
y,2.0,20.0
total,3.0,31.0
"""))
    assert len(table.row_labels) == 3


def test_aggregate_not_dropped_when_all_rows_qualify():
    # two equal rows are each the sum of the other; dropping both
    # would empty the table, so neither is removed
    table = load_table(csv("""
R,A
x,5.0
y,5.0
"""))
    assert table.row_labels == ("x", "y")


def test_aggregate_candidate_blocked_by_missing_cell():
    table = load_table(csv("""
R,A,B
x,1.0,10.0
y,2.0,20.0
total,3.0,n/a
"""))
    assert len(table.row_labels) == 3


def test_impute_fills_only_missing_cells_deterministically():
    table = load_table(csv("""
R,A
a,10.0
b,12.0
c,n/a
d,11.0
e,14.0
"""))
    col = table.column("A")
    one = impute_missing(col, np.random.default_rng(5))
    two = impute_missing(col, np.random.default_rng(5))
    assert one.values == two.values
    assert one.values[0] == 10.0 and one.values[3] == 11.0
    assert one.values[2] is not None
    # repeated draws stay near the fitted distribution
    fills = [impute_missing(col, np.random.default_rng(s)).values[2]
             for s in range(200)]
    assert abs(float(np.mean(fills)) - 11.75) < 1.0


def test_impute_complete_column_consumes_no_randomness():
    table = load_table(BASIC)
    rng = np.random.default_rng(3)
    impute_table(table, rng)
    untouched = np.random.default_rng(3)
    assert rng.integers(1 << 30) == untouched.integers(1 << 30)


def test_impute_underdetermined_column_is_rejected():
    table = load_table(csv("""
R,A
a,10.0
b,n/a
c,n/a
"""))
    filled = impute_missing(table.column("A"), np.random.default_rng(0))
    assert filled.kind == "rejected"


def test_merge_aligns_rows_and_disambiguates_headers():
    left = load_table(csv("R,A,B\nx,1,2\ny,3,4"), name="left")
    right = load_table(csv("R,A\ny,30\nx,10"), name="right")
    merged = merge_tables([left, right])
    assert merged.row_labels == ("x", "y")
    headers = [c.header for c in merged.columns]
    assert headers == ["A (left)", "B", "A (right)"]
    assert merged.column("A (right)").values == (10.0, 30.0)


def test_merge_rejects_mismatched_row_sets():
    left = load_table(csv("R,A\nx,1\ny,2"), name="left")
    right = load_table(csv("R,A\nx,1\nz,2"), name="right")
    with pytest.raises(TableError):
        merge_tables([left, right])
    with pytest.raises(TableError):
        merge_tables([])


def test_decompose_by_column_drops_nonnumeric_outputs():
    table = load_table(csv("R,A,Tag\nx,1,aa\ny,2,bb"))
    parts = decompose_table(table, "by_column")
    assert [p.columns[0].header for p in parts] == ["A"]


def test_decompose_by_row_group():
    table = load_table(csv("R,A\na,1\nb,2\nc,3\nd,4\ne,5"))
    parts = decompose_table(table, "by_row_group", group_size=2)
    assert [p.row_labels for p in parts] == [("a", "b"), ("c", "d"), ("e",)]
    with pytest.raises(TableError):
        decompose_table(table, "by_row_group", group_size=0)
    with pytest.raises(TableError):
        decompose_table(table, "sideways")


def test_bundled_tables_load(train_tables, novel_tables):
    assert len(train_tables) == 8
    assert len(novel_tables) == 6
    by_name = {t.name: t for t in train_tables}
    assert "Total" not in by_name["regional_sales"].row_labels
    inventory = by_name["device_inventory"]
    assert inventory.column("Serial Number").kind == "rejected"
    assert inventory.column("Batch Code").kind == "rejected"
    # novel labels are disjoint from train labels
    train_labels = {lab for t in train_tables for lab in t.row_labels}
    novel_labels = {lab for t in novel_tables for lab in t.row_labels}
    assert not train_labels & novel_labels
