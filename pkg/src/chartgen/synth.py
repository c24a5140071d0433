"""Chart specification synthesis: tables in, randomized ChartSpecs out.

A ChartSpec is a complete, renderable description of one chart: the
type, the data slice pulled from a table, all display text, and a
style drawn from finite catalogs. Generation is pure given the random
stream, so a (table, chart type, seed) triple always produces the
same spec.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field, replace
from importlib import resources

import numpy as np

from .errors import SynthesisError
from .tables import DataTable

CHART_TYPES = (
    "grouped_bar_h", "grouped_bar_v", "stacked_bar_h", "stacked_bar_v",
    "pie", "donut", "box_h", "box_v", "line", "scatter",
)

DISPLAY_NAMES = {
    "grouped_bar_h": "horizontal grouped bar",
    "grouped_bar_v": "vertical grouped bar",
    "stacked_bar_h": "horizontal stacked bar",
    "stacked_bar_v": "vertical stacked bar",
    "pie": "pie",
    "donut": "donut",
    "box_h": "horizontal box",
    "box_v": "vertical box",
    "line": "line",
    "scatter": "scatter",
}

BAR_TYPES = {"grouped_bar_h", "grouped_bar_v",
             "stacked_bar_h", "stacked_bar_v"}
GROUPED_TYPES = {"grouped_bar_h", "grouped_bar_v"}
STACKED_TYPES = {"stacked_bar_h", "stacked_bar_v"}
BOX_TYPES = {"box_h", "box_v"}
CIRCULAR_TYPES = {"pie", "donut"}
HORIZONTAL_TYPES = {"grouped_bar_h", "stacked_bar_h", "box_h"}

# Style catalogs. Every styling choice is drawn uniformly from one of
# these finite sets, so any sampled style is renderable.
TITLE_POSITIONS = ("left", "center", "right")
FONT_FAMILIES = ("sans", "serif", "mono")
FONT_SIZES = (10, 11, 12, 13)
MARKER_STYLES = ("circle", "square", "diamond", "triangle_up", "cross")
LINE_WIDTHS = (1.5, 2.0, 2.5, 3.0)
LINE_STYLES = ("solid", "dashed", "dotted", "dashdot")
GRID_STYLES = ("none", "horizontal", "vertical", "both")
GRID_COLORS = ("#dddddd", "#cccccc", "#e8e8e8", "#d0d0e0")
LEGEND_PLACEMENTS = ("outside_right", "outside_bottom",
                     "inside_upper_left", "inside_upper_right")
BAR_WIDTH_FRACTIONS = (0.5, 0.6, 0.7, 0.8, 0.9)
PIE_INNER_FRACTIONS = (0.0, 0.35, 0.45, 0.55)
PIE_OUTER_RADII = (90.0, 105.0, 120.0)

# Data-slice bounds: rows per categorical chart, points per line or
# scatter chart, series per grouped/stacked chart, boxes per box chart.
CATEGORY_ROW_RANGE = (3, 12)
POINT_ROW_RANGE = (10, 60)
GROUPED_SERIES_RANGE = (1, 4)
STACKED_SERIES_RANGE = (2, 4)
BOX_COUNT_RANGE = (3, 12)

# Co-plotted columns must have similar magnitudes: the ratio of the
# largest to smallest median absolute nonzero value is capped here.
MAGNITUDE_RATIO_CAP = 100.0

# Minimum relative spread required of glyph extents on horizontal
# charts, so that orientation stays recoverable from geometry alone.
MIN_RELATIVE_SPREAD = 1e-3

ERROR_BAR_FRACTION_RANGE = (0.02, 0.1)


@dataclass(frozen=True)
class StyleConfig:
    title_position: str
    font_family: str
    font_size: int
    marker_style: str
    line_width: float
    line_style: str
    grid_style: str
    grid_color: str
    legend_placement: str
    legend_border: bool
    bar_width_fraction: float
    pie_inner_radius_fraction: float
    pie_outer_radius: float
    error_bars: bool
    palette_id: int


@dataclass(frozen=True)
class BoxStats:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    std: float


@dataclass(frozen=True)
class ChartSpec:
    chart_type: str
    title: str  # always non-empty; every chart carries a title
    x_axis_title: str  # bottom axis; empty means absent
    y_axis_title: str  # left axis; empty means absent
    legend_title: str  # empty means absent
    category_labels: tuple
    series: tuple  # ((label, (values...)), ...); scatter: x column, y column
    box_stats: tuple  # BoxStats per category, box charts only
    show_legend: bool
    error_values: tuple  # per-series error magnitudes, grouped bars only
    style: StyleConfig
    seed: int

    @property
    def has_error_bars(self) -> bool:
        return self.style.error_bars and bool(self.error_values)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["series"] = [[label, list(vals)] for label, vals in self.series]
        d["box_stats"] = [asdict(b) for b in self.box_stats]
        d["error_values"] = [list(e) for e in self.error_values]
        d["category_labels"] = list(self.category_labels)
        return d

    @staticmethod
    def from_dict(d: dict) -> "ChartSpec":
        return ChartSpec(
            chart_type=d["chart_type"],
            title=d["title"],
            x_axis_title=d["x_axis_title"],
            y_axis_title=d["y_axis_title"],
            legend_title=d["legend_title"],
            category_labels=tuple(d["category_labels"]),
            series=tuple((label, tuple(vals)) for label, vals in d["series"]),
            box_stats=tuple(BoxStats(**b) for b in d["box_stats"]),
            show_legend=d["show_legend"],
            error_values=tuple(tuple(e) for e in d["error_values"]),
            style=StyleConfig(**d["style"]),
            seed=d["seed"],
        )


def _load_palettes() -> list:
    path = resources.files("chartgen.data").joinpath("palettes.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    return [p["colors"] for p in data["palettes"]]


_PALETTES = _load_palettes()


def palette_colors(palette_id: int, n: int) -> list:
    """First n colors of a bundled palette."""
    if palette_id < 0 or palette_id >= len(_PALETTES):
        raise SynthesisError(f"unknown palette id {palette_id}")
    colors = _PALETTES[palette_id]
    if n > len(colors):
        raise SynthesisError(
            f"palette {palette_id} has {len(colors)} colors, need {n}")
    return list(colors[:n])


def palette_count() -> int:
    return len(_PALETTES)


def _choice(rng: np.random.Generator, options):
    return options[int(rng.integers(len(options)))]


def sample_style(rng: np.random.Generator, min_colors: int = 1) -> StyleConfig:
    """Draw a style uniformly from the catalogs.

    Fields are drawn in declaration order so a given stream state
    always yields the same config. Only palettes with at least
    ``min_colors`` entries are considered.
    """
    style = StyleConfig(
        title_position=_choice(rng, TITLE_POSITIONS),
        font_family=_choice(rng, FONT_FAMILIES),
        font_size=_choice(rng, FONT_SIZES),
        marker_style=_choice(rng, MARKER_STYLES),
        line_width=_choice(rng, LINE_WIDTHS),
        line_style=_choice(rng, LINE_STYLES),
        grid_style=_choice(rng, GRID_STYLES),
        grid_color=_choice(rng, GRID_COLORS),
        legend_placement=_choice(rng, LEGEND_PLACEMENTS),
        legend_border=bool(rng.integers(2)),
        bar_width_fraction=_choice(rng, BAR_WIDTH_FRACTIONS),
        pie_inner_radius_fraction=_choice(rng, PIE_INNER_FRACTIONS),
        pie_outer_radius=_choice(rng, PIE_OUTER_RADII),
        error_bars=bool(rng.integers(2)),
        palette_id=0,
    )
    admissible = [i for i, p in enumerate(_PALETTES) if len(p) >= min_colors]
    if not admissible:
        raise SynthesisError(f"no palette with {min_colors} colors")
    return replace(style, palette_id=int(_choice(rng, admissible)))


def _median_abs_nonzero(values) -> float:
    mags = [abs(v) for v in values if v is not None and v != 0.0]
    if not mags:
        return 0.0
    return float(np.median(mags))


def select_columns(table: DataTable, k: int, rng: np.random.Generator) -> list:
    """Pick k numeric columns whose magnitudes are mutually similar.

    Admissibility: over the selection, the ratio of the largest to the
    smallest median absolute nonzero value is at most 100. All-zero
    columns are never selected. The subset is drawn uniformly from the
    admissible subsets.
    """
    numeric = [c for c in table.numeric_columns
               if _median_abs_nonzero(c.values) > 0.0]
    if len(numeric) < k:
        raise SynthesisError(
            f"{table.name}: need {k} numeric columns, have {len(numeric)}")
    medians = {c.header: _median_abs_nonzero(c.values) for c in numeric}
    admissible = []
    for combo in itertools.combinations(range(len(numeric)), k):
        mags = [medians[numeric[i].header] for i in combo]
        if max(mags) <= MAGNITUDE_RATIO_CAP * min(mags):
            admissible.append(combo)
    if not admissible:
        raise SynthesisError(
            f"{table.name}: no {k} columns with similar magnitudes")
    combo = admissible[int(rng.integers(len(admissible)))]
    return [numeric[i] for i in combo]


def _relative_spread_ok(extents) -> bool:
    """True when at least two extents differ by a visible margin."""
    top = max(extents)
    if top <= 0.0:
        return False
    return (top - min(extents)) > MIN_RELATIVE_SPREAD * top


def _pick_rows(n_rows: int, count: int, rng: np.random.Generator,
               contiguous: bool) -> list:
    if contiguous:
        start = int(rng.integers(n_rows - count + 1))
        return list(range(start, start + count))
    idx = rng.choice(n_rows, size=count, replace=False)
    return sorted(int(i) for i in idx)


def _quartiles(values) -> BoxStats:
    arr = np.asarray(values, dtype=float)
    q1, med, q3 = (float(np.percentile(arr, p)) for p in (25, 50, 75))
    return BoxStats(minimum=float(arr.min()), q1=q1, median=med, q3=q3,
                    maximum=float(arr.max()),
                    std=float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0)


def _make_title(table: DataTable, rng: np.random.Generator) -> str:
    # Every chart carries a title; only its wording varies.
    if table.label_header and rng.random() < 0.4:
        return f"{table.name} by {table.label_header}"
    return table.name


def make_chart_spec(table: DataTable, chart_type: str,
                    rng: np.random.Generator) -> ChartSpec:
    """Synthesize one randomized ChartSpec of the given type.

    Raises SynthesisError when the table cannot support the type
    (too few rows or columns, values violating the type's sign
    constraints, or a data slice whose geometry would be degenerate);
    callers respond by retrying with another table or type.
    """
    if chart_type not in CHART_TYPES:
        raise SynthesisError(f"unknown chart type {chart_type!r}")
    seed = int(rng.integers(2 ** 63))
    title = _make_title(table, rng)

    if chart_type in CIRCULAR_TYPES:
        return _make_circular(table, chart_type, rng, seed, title)
    if chart_type in BOX_TYPES:
        return _make_box(table, chart_type, rng, seed, title)
    if chart_type == "scatter":
        return _make_scatter(table, rng, seed, title)
    if chart_type == "line":
        return _make_line(table, rng, seed, title)
    return _make_bars(table, chart_type, rng, seed, title)


def _finish(chart_type, title, x_title, y_title, legend_title,
            category_labels, series, box_stats, show_legend,
            error_values, rng, seed, min_colors) -> ChartSpec:
    style = sample_style(rng, min_colors=min_colors)
    if chart_type == "pie":
        style = replace(style, pie_inner_radius_fraction=0.0)
    elif chart_type == "donut":
        if style.pie_inner_radius_fraction == 0.0:
            style = replace(style, pie_inner_radius_fraction=_choice(
                rng, [f for f in PIE_INNER_FRACTIONS if f > 0.0]))
    if chart_type not in GROUPED_TYPES or not error_values:
        style = replace(style, error_bars=False)
    if not style.error_bars:
        error_values = []
    return ChartSpec(
        chart_type=chart_type, title=title,
        x_axis_title=x_title, y_axis_title=y_title,
        legend_title=legend_title,
        category_labels=tuple(category_labels),
        series=tuple((label, tuple(float(v) for v in vals))
                     for label, vals in series),
        box_stats=tuple(box_stats),
        show_legend=show_legend,
        error_values=tuple(tuple(float(e) for e in errs)
                           for errs in error_values),
        style=style, seed=seed)


def _axis_titles(table, value_title, rng, horizontal):
    cat_title = table.label_header if rng.random() < 0.75 else ""
    val_title = value_title if rng.random() < 0.75 else ""
    if horizontal:
        return val_title, cat_title  # value axis runs along the bottom
    return cat_title, val_title


def _make_circular(table, chart_type, rng, seed, title):
    lo, hi = CATEGORY_ROW_RANGE
    col = select_columns(table, 1, rng)[0]
    usable = [i for i, v in enumerate(col.values)
              if v is not None and v > 0.0]
    if len(usable) < lo:
        raise SynthesisError(f"{table.name}: too few positive rows for pie")
    count = int(rng.integers(lo, min(hi, len(usable)) + 1))
    chosen = [usable[i] for i in
              sorted(int(j) for j in rng.choice(len(usable), size=count,
                                                replace=False))]
    labels = [table.row_labels[i] for i in chosen]
    values = [float(col.values[i]) for i in chosen]
    legend_title = table.label_header if (
        table.label_header and rng.random() < 0.75) else ""
    return _finish(chart_type, title, "", "", legend_title, labels,
                   [(col.header, values)], [], True, [], rng, seed,
                   min_colors=count)


def _make_box(table, chart_type, rng, seed, title):
    lo, hi = BOX_COUNT_RANGE
    numeric_count = len([c for c in table.numeric_columns
                         if _median_abs_nonzero(c.values) > 0.0])
    if numeric_count < lo:
        raise SynthesisError(f"{table.name}: too few columns for box chart")
    k = int(rng.integers(lo, min(hi, numeric_count) + 1))
    cols = select_columns(table, k, rng)
    stats = []
    for c in cols:
        values = [v for v in c.values if v is not None]
        if len(values) < 4 or max(values) <= min(values):
            raise SynthesisError(f"{table.name}: column {c.header!r} too "
                                 "flat for a box chart")
        stats.append(_quartiles(values))
    if chart_type == "box_h":
        if not _relative_spread_ok([s.maximum - s.minimum for s in stats]):
            raise SynthesisError(f"{table.name}: box spans all equal; "
                                 "orientation would be ambiguous")
    labels = [c.header for c in cols]
    value_title = table.name if rng.random() < 0.5 else ""
    if chart_type == "box_h":
        x_title, y_title = value_title, ""
    else:
        x_title, y_title = "", value_title
    return _finish(chart_type, title, x_title, y_title, "", labels, [],
                   stats, False, [], rng, seed, min_colors=k)


def _make_scatter(table, rng, seed, title):
    lo, hi = POINT_ROW_RANGE
    cols = select_columns(table, 2, rng)
    x_col, y_col = cols
    usable = [i for i in range(len(table.row_labels))
              if x_col.values[i] is not None and y_col.values[i] is not None]
    if len(usable) < lo:
        raise SynthesisError(f"{table.name}: too few rows for scatter")
    count = int(rng.integers(lo, min(hi, len(usable)) + 1))
    chosen = [usable[i] for i in
              sorted(int(j) for j in rng.choice(len(usable), size=count,
                                                replace=False))]
    xs = [float(x_col.values[i]) for i in chosen]
    ys = [float(y_col.values[i]) for i in chosen]
    show_legend = bool(rng.integers(2))
    return _finish("scatter", title, x_col.header, y_col.header, "",
                   [], [(x_col.header, xs), (y_col.header, ys)], [],
                   show_legend, [], rng, seed, min_colors=1)


def _make_line(table, rng, seed, title):
    lo, hi = POINT_ROW_RANGE
    col = select_columns(table, 1, rng)[0]
    n = len(table.row_labels)
    runs = _missing_free_runs(col.values, n)
    runs = [r for r in runs if r[1] - r[0] + 1 >= lo]
    if not runs:
        raise SynthesisError(f"{table.name}: no long enough run for line")
    start0, stop0 = runs[int(rng.integers(len(runs)))]
    avail = stop0 - start0 + 1
    count = int(rng.integers(lo, min(hi, avail) + 1))
    start = start0 + int(rng.integers(avail - count + 1))
    chosen = list(range(start, start + count))
    labels = [table.row_labels[i] for i in chosen]
    values = [float(col.values[i]) for i in chosen]
    if max(values) <= min(values):
        raise SynthesisError(f"{table.name}: line slice is constant")
    show_legend = bool(rng.integers(2))
    x_title, y_title = _axis_titles(table, col.header, rng,
                                    horizontal=False)
    legend_title = table.name if (show_legend and rng.random() < 0.5) else ""
    return _finish("line", title, x_title, y_title, legend_title, labels,
                   [(col.header, values)], [], show_legend, [], rng, seed,
                   min_colors=1)


def _missing_free_runs(values, n):
    runs = []
    start = None
    for i in range(n):
        if values[i] is not None:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, n - 1))
    return runs


def _make_bars(table, chart_type, rng, seed, title):
    lo, hi = CATEGORY_ROW_RANGE
    stacked = chart_type in STACKED_TYPES
    s_lo, s_hi = STACKED_SERIES_RANGE if stacked else GROUPED_SERIES_RANGE
    numeric_count = len([c for c in table.numeric_columns
                         if _median_abs_nonzero(c.values) > 0.0])
    if numeric_count < s_lo:
        raise SynthesisError(f"{table.name}: too few columns for {chart_type}")
    k = int(rng.integers(s_lo, min(s_hi, numeric_count) + 1))
    cols = select_columns(table, k, rng)

    def row_ok(i):
        for c in cols:
            v = c.values[i]
            if v is None or v == 0.0 or (stacked and v <= 0.0):
                return False
        return True

    usable = [i for i in range(len(table.row_labels)) if row_ok(i)]
    if len(usable) < lo:
        raise SynthesisError(f"{table.name}: too few usable rows "
                             f"for {chart_type}")
    count = int(rng.integers(lo, min(hi, len(usable)) + 1))
    chosen = [usable[i] for i in
              sorted(int(j) for j in rng.choice(len(usable), size=count,
                                                replace=False))]
    labels = [table.row_labels[i] for i in chosen]
    series = [(c.header, [float(c.values[i]) for i in chosen]) for c in cols]

    if chart_type in HORIZONTAL_TYPES:
        extents = [abs(v) for _, vals in series for v in vals]
        if not _relative_spread_ok(extents):
            raise SynthesisError(f"{table.name}: bar lengths all equal; "
                                 "orientation would be ambiguous")

    # Error magnitudes are drawn here (before the style, in stream
    # order) and discarded later if the sampled style turns them off.
    error_values = []
    if chart_type in GROUPED_TYPES:
        e_lo, e_hi = ERROR_BAR_FRACTION_RANGE
        error_values = [
            [abs(v) * float(rng.uniform(e_lo, e_hi)) for v in vals]
            for _, vals in series]

    show_legend = True if k > 1 else bool(rng.integers(2))
    value_title = series[0][0] if k == 1 else table.name
    x_title, y_title = _axis_titles(
        table, value_title, rng,
        horizontal=(chart_type in HORIZONTAL_TYPES))
    legend_title = ""
    if show_legend and k > 1 and rng.random() < 0.5:
        legend_title = table.name
    return _finish(chart_type, title, x_title, y_title, legend_title,
                   labels, series, [], show_legend, error_values, rng,
                   seed, min_colors=k)
