import json

import pytest

from chartgen import geometry as geo
from chartgen.annotate import (
    ELEMENT_CLASSES,
    MASKED_CLASSES,
    PLOT_CLASSES,
    TEXT_CLASSES,
    from_json,
    to_json,
)
from chartgen.synth import CHART_TYPES

SEEDS = (3, 17)


def test_class_catalog():
    assert len(TEXT_CLASSES) == 11
    assert len(PLOT_CLASSES) == 9
    assert len(ELEMENT_CLASSES) == 20
    assert len(set(ELEMENT_CLASSES)) == 20
    assert set(MASKED_CLASSES) <= set(PLOT_CLASSES)


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_order_hints_contiguous(chart_type, make_chart):
    for seed in SEEDS:
        _, _, ann = make_chart(chart_type, seed)
        hints = [el.order_hint for el in ann.elements]
        assert hints == list(range(len(ann.elements)))


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_has_text_follows_class(chart_type, make_chart):
    for seed in SEEDS:
        _, _, ann = make_chart(chart_type, seed)
        for el in ann.elements:
            assert el.element_class in ELEMENT_CLASSES
            assert el.has_text == (el.element_class in TEXT_CLASSES)
            if not el.has_text:
                assert el.text == ""
            # Boxes and previews are text-bearing slots without strings.
            if el.element_class in ("legend_box", "legend_preview"):
                assert el.text == ""
            if el.element_class in ("chart_title", "legend_label",
                                    "x_axis_label", "y_axis_label",
                                    "pie_label"):
                assert el.text != ""


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_box_is_tight_mask_bounds(chart_type, make_chart):
    for seed in SEEDS:
        _, _, ann = make_chart(chart_type, seed)
        for el in ann.elements:
            for v in el.box:
                assert v == round(v, 2)
            if el.element_class in MASKED_CLASSES:
                assert el.box == tuple(geo.bounds(el.mask))
                for px, py in el.mask:
                    assert px == round(px, 2) and py == round(py, 2)


def test_chart_id_and_canvas(make_chart):
    _, _, ann = make_chart("pie", 3)
    assert ann.chart_id == "pie-3"
    assert ann.canvas == (800, 600)


def test_by_class(make_chart):
    _, _, ann = make_chart("donut", 3)
    wedges = ann.by_class("wedge")
    assert wedges and all(e.element_class == "wedge" for e in wedges)
    assert ann.by_class("bar_v") == []


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_json_round_trip(chart_type, make_chart):
    _, _, ann = make_chart(chart_type, 3)
    text = to_json(ann)
    back = from_json(text)
    assert back == ann
    assert to_json(back) == text


def test_json_shape(make_chart):
    _, _, ann = make_chart("line", 3)
    payload = json.loads(to_json(ann))
    assert payload["schema_version"] == "1"
    assert payload["canvas"] == [800, 600]
    for entry in payload["elements"]:
        assert set(entry) == {"element_class", "box", "mask", "text",
                              "order_hint"}
        if entry["element_class"] in MASKED_CLASSES:
            assert entry["mask"] is not None
        else:
            assert entry["mask"] is None
        # Text is null exactly for plot glyphs.
        assert (entry["text"] is None) == \
            (entry["element_class"] in PLOT_CLASSES)
    # Compact separators, stable key order: serialization is canonical.
    assert to_json(ann) == json.dumps(payload, sort_keys=True,
                                      separators=(",", ":"))
