import dataclasses
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from chartgen.annotate import MASKED_CLASSES, TEXT_CLASSES
from chartgen.errors import RenderError
from chartgen.layout import (
    LINE_TICK_TARGET,
    format_value,
    layout,
    line_tick_indices,
    nice_ticks,
)
from chartgen.svgout import render_svg
from chartgen.synth import CHART_TYPES

SEEDS = (3, 17, 88)

# The primary glyph class each chart type must emit at least once.
MAIN_GLYPH = {
    "grouped_bar_h": "bar_h",
    "grouped_bar_v": "bar_v",
    "stacked_bar_h": "stacked_segment_h",
    "stacked_bar_v": "stacked_segment_v",
    "pie": "wedge",
    "donut": "wedge",
    "box_h": "box_glyph_h",
    "box_v": "box_glyph_v",
    "line": "line_segment",
    "scatter": "scatter_marker",
}

# Numeric geometry attributes whose values the writer rounds to 2 dp.
_COORD_ATTRS = ("x", "y", "x1", "y1", "x2", "y2", "width", "height",
                "cx", "cy", "r", "points", "d", "transform")
_LONG_DECIMAL = re.compile(r"\d\.\d{3,}")


def test_tick_helper_covers_range():
    rng = np.random.default_rng(5)
    for _ in range(300):
        lo = float(rng.uniform(-1e4, 1e4))
        hi = lo + float(rng.uniform(1e-3, 2e4))
        ticks, step = nice_ticks(lo, hi)
        assert 4 <= len(ticks) <= 8
        assert ticks[0] <= lo + 1e-9 * max(1.0, abs(lo))
        assert ticks[-1] >= hi - 1e-9 * max(1.0, abs(hi))
        gaps = np.diff(ticks)
        assert np.allclose(gaps, step, rtol=1e-9)
        # Steps come from the 1/2/2.5/5 ladder.
        mant = step / (10.0 ** np.floor(np.log10(step)))
        assert min(abs(mant - m) for m in (1.0, 2.0, 2.5, 5.0, 10.0)) < 1e-9


def test_tick_helper_degenerate_range():
    ticks, step = nice_ticks(7.0, 7.0)
    assert ticks[0] <= 6.5 and ticks[-1] >= 7.5
    down, _ = nice_ticks(9.0, 2.0)  # reversed bounds are swapped
    assert down[0] <= 2.0 and down[-1] >= 9.0


def test_line_tick_indices_properties():
    for n in range(1, 61):
        idx = line_tick_indices(n)
        assert idx == sorted(set(idx))
        assert idx[0] == 0
        if n >= 2:
            assert idx[-1] == n - 1
        assert len(idx) <= min(n, LINE_TICK_TARGET)
        if n >= LINE_TICK_TARGET:
            # Near-even spread: gaps differ by at most one step unit.
            gaps = np.diff(idx)
            assert gaps.max() - gaps.min() <= 1


def test_format_value():
    assert format_value(3.14159, 2) == "3.14"
    assert format_value(5.0, 0) == "5"
    assert format_value(-0.0001, 2) == "0.00"  # never "-0.00"


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_annotations_stay_on_canvas(chart_type, make_chart):
    for seed in SEEDS:
        _, scene, ann = make_chart(chart_type, seed)
        assert tuple(ann.canvas) == (scene.width, scene.height) == (800, 600)
        for el in ann.elements:
            x0, y0, x1, y1 = el.box
            assert x0 <= x1 and y0 <= y1
            assert x0 >= -0.01 and y0 >= -0.01
            assert x1 <= 800.01 and y1 <= 600.01


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_expected_classes_present(chart_type, make_chart):
    for seed in SEEDS:
        _, _, ann = make_chart(chart_type, seed)
        classes = {el.element_class for el in ann.elements}
        assert "chart_title" in classes
        assert MAIN_GLYPH[chart_type] in classes
        if chart_type in ("pie", "donut"):
            assert "pie_label" in classes
            assert not classes & {"x_axis_label", "y_axis_label",
                                  "x_axis_title", "y_axis_title"}


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_masks_only_on_masked_classes(chart_type, make_chart):
    for seed in SEEDS:
        _, _, ann = make_chart(chart_type, seed)
        for el in ann.elements:
            if el.element_class in MASKED_CLASSES:
                assert len(el.mask) >= 3
            else:
                assert not el.mask


def test_line_segment_count_matches_ticks(make_chart):
    for seed in SEEDS:
        spec, _, ann = make_chart("line", seed)
        n_points = len(spec.series[0][1])
        n_ticks = len(line_tick_indices(n_points))
        segments = [el for el in ann.elements
                    if el.element_class == "line_segment"]
        assert len(segments) == n_ticks - 1


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_svg_well_formed_with_unique_ids(chart_type, make_chart):
    _, scene, ann = make_chart(chart_type, 3)
    svg = render_svg(scene)
    root = ET.fromstring(svg.decode("utf-8"))
    assert root.tag.endswith("svg")
    ids = [el.get("id") for el in root.iter() if el.get("id")]
    assert len(ids) == len(set(ids)) == len(ann.elements)


def test_svg_bytes_deterministic(make_chart):
    for chart_type in ("grouped_bar_v", "pie", "line"):
        _, scene, _ = make_chart(chart_type, 17)
        assert render_svg(scene) == render_svg(scene)


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_svg_coordinates_rounded(chart_type, make_chart):
    _, scene, _ = make_chart(chart_type, 88)
    root = ET.fromstring(render_svg(scene).decode("utf-8"))
    for el in root.iter():
        for attr in _COORD_ATTRS:
            value = el.get(attr)
            if value is not None:
                assert not _LONG_DECIMAL.search(value), (attr, value)


def test_text_runs_match_annotated_text(make_chart):
    """Every annotated text element's string appears in the SVG."""
    _, scene, ann = make_chart("grouped_bar_v", 3)
    svg = render_svg(scene).decode("utf-8")
    for el in ann.elements:
        if el.has_text and el.text:
            assert el.text in svg


def test_dense_category_labels_rejected(make_chart):
    spec, _, _ = make_chart("grouped_bar_v", 3)
    n = 70
    crowded = dataclasses.replace(
        spec,
        category_labels=tuple(f"Category {i:02d}" for i in range(n)),
        series=(("Series A", tuple(float(i + 1) for i in range(n))),),
        box_stats=(),
        error_values=(),
    )
    with pytest.raises(RenderError):
        layout(crowded)


def test_text_classes_constant():
    assert set(MASKED_CLASSES) == {"wedge", "line_segment"}
    assert "chart_title" in TEXT_CLASSES
    assert "legend_box" in TEXT_CLASSES  # carries has_text with "" text
    assert "wedge" not in TEXT_CLASSES
