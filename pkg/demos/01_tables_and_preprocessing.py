"""
Loading and cleaning data tables
================================

Every chart starts from a CSV table: a header row, a label column,
and data columns that are classified as numeric, categorical, or
rejected (identifier junk such as serial numbers).  Aggregate rows
are detected and dropped, and missing numeric cells can be imputed
from the observed distribution.
"""

import numpy as np

from chartgen import impute_table, load_table, merge_tables, decompose_table
from chartgen.corpus import bundled_table_dir

# ---------------------------------------------------------------------
# Load a bundled table.  regional_sales.csv ships with a "Total" row
# whose cells equal the column sums of the other rows; the loader
# detects and removes it, since such rows would double-count data.

path = bundled_table_dir("train") / "regional_sales.csv"
raw = path.read_bytes()
print(raw.decode().splitlines()[0])
print(f"raw rows ........ {len(raw.decode().strip().splitlines()) - 1}")

table = load_table(raw, name="regional_sales")
print(f"kept rows ....... {len(table.row_labels)} (aggregate row dropped)")
print(f"row labels ...... {', '.join(table.row_labels)}")

# ---------------------------------------------------------------------
# Column classification.  device_inventory.csv mixes plottable numbers
# with serial numbers and hex batch codes; the identifier columns are
# kept in the table but marked rejected, so they are never plotted.

inventory = load_table(
    (bundled_table_dir("train") / "device_inventory.csv").read_bytes(),
    name="device_inventory")
for column in inventory.columns:
    print(f"{column.header:<18} -> {column.kind}")

# ---------------------------------------------------------------------
# Missing cells.  energy_mix.csv has N/A cells; imputation fills them
# with draws from a normal distribution fitted to the observed values
# of the same column.  The fill is deterministic given the generator.

energy = load_table(
    (bundled_table_dir("train") / "energy_mix.csv").read_bytes(),
    name="energy_mix")
reserve = energy.column("Reserve Margin")
missing = [lab for lab, v in zip(energy.row_labels, reserve.values)
           if v is None]
print(f"missing reserve margins: {', '.join(missing)}")

filled = impute_table(energy, np.random.default_rng(7))
for lab in missing:
    i = energy.row_labels.index(lab)
    print(f"imputed {lab}: {filled.column('Reserve Margin').values[i]:.2f}")

# ---------------------------------------------------------------------
# Tables can also be merged column-wise (rows aligned by label) and
# decomposed back into single-column tables or row groups.

merged = merge_tables([table, decompose_table(table, "by_column")[0]])
print(f"merged table has {len(merged.columns)} columns: "
      f"{', '.join(c.header for c in merged.columns)}")

groups = decompose_table(table, "by_row_group", group_size=3)
print(f"{len(groups)} row groups of <=3 rows each")
