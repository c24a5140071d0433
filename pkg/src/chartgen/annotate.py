"""Dense annotations over the twenty chart element classes.

The annotation set mirrors the SVG node-for-node: annotation k
describes the SVG node with id ``el<k>``. Coordinates are rounded to
two decimals; for masked classes the box is recomputed from the
rounded mask so box == tight bounds of mask holds exactly in the
serialized form.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from . import geometry as geo
from .layout import Layout

TEXT_CLASSES = (
    "chart_title", "x_axis_title", "y_axis_title", "x_axis_label",
    "y_axis_label", "legend_box", "legend_title", "legend_label",
    "legend_preview", "pie_label", "pie_value",
)
PLOT_CLASSES = (
    "bar_v", "bar_h", "stacked_segment_v", "stacked_segment_h", "wedge",
    "box_glyph_v", "box_glyph_h", "line_segment", "scatter_marker",
)
ELEMENT_CLASSES = TEXT_CLASSES + PLOT_CLASSES
MASKED_CLASSES = ("wedge", "line_segment")


@dataclass(frozen=True)
class Annotation:
    element_class: str
    box: tuple  # (x0, y0, x1, y1)
    mask: tuple  # vertex tuples, empty for unmasked classes
    text: str  # None-like "" only meaningful via has_text
    has_text: bool
    order_hint: int


@dataclass(frozen=True)
class AnnotationSet:
    chart_id: str
    canvas: tuple
    elements: tuple

    def by_class(self, element_class: str) -> list:
        return [e for e in self.elements
                if e.element_class == element_class]


def annotate(layout: Layout, chart_id: str = "chart") -> AnnotationSet:
    """Extract one annotation per annotated layout node, in draw order."""
    elements = []
    k = 0
    for node in layout.nodes:
        cls = node.element_class
        if not cls:
            continue
        if cls in MASKED_CLASSES:
            mask = tuple(geo.round2_points(node.mask))
            box = geo.bounds(mask)
        else:
            mask = ()
            box = geo.round2_box(node.box)
        has_text = cls in TEXT_CLASSES
        elements.append(Annotation(
            element_class=cls, box=tuple(box), mask=mask,
            text=node.ann_text if has_text else "",
            has_text=has_text, order_hint=k))
        k += 1
    return AnnotationSet(chart_id=chart_id, canvas=(layout.width,
                                                    layout.height),
                         elements=tuple(elements))


def to_json(ann: AnnotationSet) -> str:
    payload = {
        "schema_version": "1",
        "chart_id": ann.chart_id,
        "canvas": list(ann.canvas),
        "elements": [
            {
                "element_class": e.element_class,
                "box": list(e.box),
                "mask": [list(p) for p in e.mask] if e.mask else None,
                "text": e.text if e.has_text else None,
                "order_hint": e.order_hint,
            }
            for e in ann.elements
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def from_json(text: str) -> AnnotationSet:
    d = json.loads(text)
    elements = tuple(
        Annotation(
            element_class=e["element_class"],
            box=tuple(e["box"]),
            mask=tuple(tuple(p) for p in e["mask"]) if e["mask"] else (),
            text=e["text"] if e["text"] is not None else "",
            has_text=e["text"] is not None,
            order_hint=e["order_hint"],
        )
        for e in d["elements"]
    )
    return AnnotationSet(chart_id=d["chart_id"], canvas=tuple(d["canvas"]),
                         elements=elements)
