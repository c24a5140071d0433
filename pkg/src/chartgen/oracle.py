"""Rule-based answer solver.

A :class:`SemanticForm` names an operation over concrete chart elements
(categories, series, titles).  :func:`solve` maps a form plus the chart
spec it was grounded against to the exact answer set.  The solver is a
pure function of its inputs: no randomness, no state, no I/O — which is
what lets it double as an independent checker for stored answers.

Element references are ``(element_type, element_order)`` pairs using
the canonical ordering (categories left-to-right on vertical charts,
bottom-to-top on horizontal ones, clockwise from 12 o'clock on pies;
series in legend order).  Chart synthesis emits categories and series
in exactly that order, so order indices resolve directly into
``ChartSpec.category_labels`` / ``ChartSpec.series``.

Answer conventions:

- ``ARGMAX``/``ARGMIN`` return every tied label.
- ``COMPARE``/``MEDIAN_COMPARE``/``SHARE_COMPARE`` use strict
  greater-than; equality answers ``"No"``.
- Counts are decimal strings capped at 15 (larger counts return the
  empty set, which callers treat as "skip this question"); a count of
  zero answers ``"None"``.
- ``TREND_SIGN`` answers ``"positive"``/``"negative"`` by the sign of
  the least-squares slope; an exactly flat slope returns the empty set.
- ``LABELS_ABOVE``/``LABELS_BELOW`` return every qualifying category
  label; none qualifying returns the empty set.

An empty result is a signal ("no answerable question here"), while a
reference that cannot be resolved at all raises :class:`QAError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import QAError
from .layout import line_tick_indices
from .synth import (BOX_TYPES, CHART_TYPES, CIRCULAR_TYPES, ChartSpec,
                    DISPLAY_NAMES, GROUPED_TYPES, STACKED_TYPES)

MAX_COUNT_ANSWER = 15

# Operations that COUNT/PRESENT can target.  "category" resolves to the
# chart's categorical axis regardless of orientation.
COUNT_TARGETS = (
    "category", "legend_label", "wedge", "bar", "stacked_segment",
    "box_glyph", "line_segment", "scatter_marker",
)
PRESENT_TARGETS = ("legend_box", "legend_title", "x_axis_title",
                   "y_axis_title")
TITLE_TARGETS = ("chart_title", "x_axis_title", "y_axis_title",
                 "legend_title")

OPS = (
    "CHART_TYPE", "COUNT", "PRESENT", "TITLE_TEXT", "ARGMAX", "ARGMIN",
    "COMPARE", "COUNT_ABOVE", "COUNT_BELOW", "LABELS_ABOVE",
    "LABELS_BELOW", "MEDIAN_COMPARE", "TREND_SIGN", "SHARE_COMPARE",
)


@dataclass(frozen=True)
class SemanticForm:
    """A grounded question: an operation plus element references.

    ``target`` carries the class for COUNT/PRESENT, the title kind for
    TITLE_TEXT, and the value context ("total" for stack totals,
    "series_at" for across-series argmax at one category) where an
    operation supports one.  ``keys`` holds ``(element_type, order)``
    pairs; their meaning is positional per operation (e.g. COMPARE
    takes the two compared categories first, then an optional series).
    """

    op: str
    target: str = ""
    keys: tuple = field(default=())

    def to_dict(self) -> dict:
        return {"op": self.op, "target": self.target,
                "keys": [list(k) for k in self.keys]}

    @staticmethod
    def from_dict(data: dict) -> "SemanticForm":
        return SemanticForm(
            op=data["op"], target=data.get("target", ""),
            keys=tuple((str(t), int(i)) for t, i in data.get("keys", [])))


def category_key_type(chart_type: str) -> str:
    """Element type that carries category labels for a chart type.

    Circular charts label categories next to their wedges; every axis
    chart keys categories as x-labels — horizontal bars and boxes are
    encoded through the axis-swap correction, which restores the
    category axis to the x-label role.
    """
    return "pie_label" if chart_type in CIRCULAR_TYPES else "x_label"


def _category_index(form: SemanticForm, spec: ChartSpec, key: tuple) -> int:
    etype, order = key
    expected = category_key_type(spec.chart_type)
    if etype != expected:
        raise QAError(
            f"{form.op}: key type {etype!r} does not reference a "
            f"category of a {spec.chart_type} chart (want {expected!r})")
    if not 0 <= order < len(spec.category_labels):
        raise QAError(f"{form.op}: category order {order} out of range "
                      f"(chart has {len(spec.category_labels)})")
    return order


def _series_index(form: SemanticForm, spec: ChartSpec, key: tuple) -> int:
    etype, order = key
    if etype != "legend_label":
        raise QAError(f"{form.op}: key type {etype!r} does not reference "
                      "a series (want 'legend_label')")
    if not 0 <= order < len(spec.series):
        raise QAError(f"{form.op}: series order {order} out of range "
                      f"(chart has {len(spec.series)})")
    return order


def _category_values(form: SemanticForm, spec: ChartSpec,
                     series_key: tuple | None) -> tuple:
    """Per-category value list for relational ops.

    With a series key: that series' values (grouped/stacked charts).
    Without: the single series of one-series charts, wedge values of
    circular charts, per-category medians of box charts, or stack
    totals when ``target`` is "total".
    """
    ct = spec.chart_type
    if form.target == "total":
        if ct not in STACKED_TYPES:
            raise QAError(f"{form.op}: stack totals undefined for {ct}")
        return tuple(sum(vals[i] for _, vals in spec.series)
                     for i in range(len(spec.category_labels)))
    if series_key is not None:
        j = _series_index(form, spec, series_key)
        return spec.series[j][1]
    if ct in BOX_TYPES:
        return tuple(bs.median for bs in spec.box_stats)
    if ct == "scatter":
        raise QAError(f"{form.op}: scatter charts have no categories")
    if len(spec.series) != 1:
        raise QAError(f"{form.op}: chart has {len(spec.series)} series; "
                      "a series reference is required")
    return spec.series[0][1]


def _split_keys(form: SemanticForm, n_positional: int):
    """Positional keys plus the optional trailing series key."""
    keys = form.keys
    if len(keys) == n_positional:
        return keys, None
    if len(keys) == n_positional + 1:
        return keys[:n_positional], keys[-1]
    raise QAError(f"{form.op}: expected {n_positional} or "
                  f"{n_positional + 1} keys, got {len(keys)}")


def _count(form: SemanticForm, spec: ChartSpec) -> frozenset:
    target = form.target
    ct = spec.chart_type
    n = len(spec.category_labels)
    if target == "category":
        if ct == "scatter":
            raise QAError("COUNT(category): scatter has no categories")
        count = n
    elif target == "legend_label":
        if not spec.show_legend:
            count = 0
        elif ct in CIRCULAR_TYPES:
            count = n
        elif ct == "scatter":
            count = 1
        else:
            count = len(spec.series)
    elif target == "wedge":
        if ct not in CIRCULAR_TYPES:
            raise QAError(f"COUNT(wedge): no wedges on {ct}")
        count = n
    elif target == "bar":
        if ct not in GROUPED_TYPES:
            raise QAError(f"COUNT(bar): no plain bars on {ct}")
        if form.keys:
            _series_index(form, spec, form.keys[0])
            count = n
        else:
            count = n * len(spec.series)
    elif target == "stacked_segment":
        if ct not in STACKED_TYPES:
            raise QAError(f"COUNT(stacked_segment): none on {ct}")
        if form.keys:
            _category_index(form, spec, form.keys[0])
            count = len(spec.series)
        else:
            count = n * len(spec.series)
    elif target == "box_glyph":
        if ct not in BOX_TYPES:
            raise QAError(f"COUNT(box_glyph): no boxes on {ct}")
        count = n
    elif target == "line_segment":
        if ct != "line":
            raise QAError(f"COUNT(line_segment): no line on {ct}")
        count = len(line_tick_indices(n)) - 1
    elif target == "scatter_marker":
        if ct != "scatter":
            raise QAError(f"COUNT(scatter_marker): no markers on {ct}")
        count = len(spec.series[0][1])
    else:
        raise QAError(f"COUNT: unknown target {form.target!r}")
    if count == 0:
        return frozenset({"None"})
    if count > MAX_COUNT_ANSWER:
        return frozenset()
    return frozenset({str(count)})


def _present(form: SemanticForm, spec: ChartSpec) -> frozenset:
    target = form.target
    if target == "legend_box":
        flag = spec.show_legend
    elif target == "legend_title":
        flag = spec.show_legend and bool(spec.legend_title)
    elif target == "x_axis_title":
        flag = bool(spec.x_axis_title)
    elif target == "y_axis_title":
        flag = bool(spec.y_axis_title)
    else:
        raise QAError(f"PRESENT: unknown target {form.target!r}")
    return frozenset({"Yes" if flag else "No"})


def _title_text(form: SemanticForm, spec: ChartSpec) -> frozenset:
    target = form.target
    if target == "chart_title":
        text = spec.title
    elif target == "x_axis_title":
        text = spec.x_axis_title
    elif target == "y_axis_title":
        text = spec.y_axis_title
    elif target == "legend_title":
        text = spec.legend_title if spec.show_legend else ""
    else:
        raise QAError(f"TITLE_TEXT: unknown target {form.target!r}")
    return frozenset({text}) if text else frozenset()


def _arg_extreme(form: SemanticForm, spec: ChartSpec,
                 maximum: bool) -> frozenset:
    if form.target == "series_at":
        # Across series at one fixed category: answers are series names.
        (cat_key,), _ = _split_keys(form, 1)
        i = _category_index(form, spec, cat_key)
        if spec.chart_type not in GROUPED_TYPES | STACKED_TYPES:
            raise QAError(f"{form.op}(series_at): needs a multi-series "
                          f"bar chart, not {spec.chart_type}")
        labels = [label for label, _ in spec.series]
        values = [vals[i] for _, vals in spec.series]
    else:
        _, series_key = _split_keys(form, 0)
        values = _category_values(form, spec, series_key)
        labels = spec.category_labels
    best = max(values) if maximum else min(values)
    return frozenset(lab for lab, v in zip(labels, values) if v == best)


def _compare(form: SemanticForm, spec: ChartSpec) -> frozenset:
    (key_a, key_b), series_key = _split_keys(form, 2)
    values = _category_values(form, spec, series_key)
    a = _category_index(form, spec, key_a)
    b = _category_index(form, spec, key_b)
    return frozenset({"Yes" if values[a] > values[b] else "No"})


def _count_vs_ref(form: SemanticForm, spec: ChartSpec,
                  above: bool) -> frozenset:
    (ref_key,), series_key = _split_keys(form, 1)
    values = _category_values(form, spec, series_key)
    r = _category_index(form, spec, ref_key)
    ref = values[r]
    count = sum(1 for v in values if (v > ref if above else v < ref))
    if count == 0:
        return frozenset({"None"})
    if count > MAX_COUNT_ANSWER:
        return frozenset()
    return frozenset({str(count)})


def _labels_vs_ref(form: SemanticForm, spec: ChartSpec,
                   above: bool) -> frozenset:
    (ref_key,), series_key = _split_keys(form, 1)
    values = _category_values(form, spec, series_key)
    r = _category_index(form, spec, ref_key)
    ref = values[r]
    return frozenset(lab for lab, v in zip(spec.category_labels, values)
                     if (v > ref if above else v < ref))


def _median_compare(form: SemanticForm, spec: ChartSpec) -> frozenset:
    if spec.chart_type not in BOX_TYPES:
        raise QAError(
            f"MEDIAN_COMPARE: no box statistics on {spec.chart_type}")
    (key_a, key_b), _ = _split_keys(form, 2)
    a = _category_index(form, spec, key_a)
    b = _category_index(form, spec, key_b)
    med_a = spec.box_stats[a].median
    med_b = spec.box_stats[b].median
    return frozenset({"Yes" if med_a > med_b else "No"})


def _trend_sign(form: SemanticForm, spec: ChartSpec) -> frozenset:
    if spec.chart_type != "line":
        raise QAError(f"TREND_SIGN: no trend line on {spec.chart_type}")
    values = np.asarray(spec.series[0][1], dtype=float)
    x = np.arange(len(values), dtype=float)
    # Least-squares slope via the covariance form: identical to a
    # degree-1 polyfit but exactly zero on constant input.
    xc = x - x.mean()
    slope = float(np.dot(xc, values - values.mean()) / np.dot(xc, xc))
    if slope > 0.0:
        return frozenset({"positive"})
    if slope < 0.0:
        return frozenset({"negative"})
    return frozenset()


def _share_compare(form: SemanticForm, spec: ChartSpec) -> frozenset:
    if spec.chart_type not in CIRCULAR_TYPES:
        raise QAError(
            f"SHARE_COMPARE: no wedge shares on {spec.chart_type}")
    # All wedge values share one total, so share order is value order.
    return _compare(form, spec)


_HANDLERS = {
    "COUNT": _count,
    "PRESENT": _present,
    "TITLE_TEXT": _title_text,
    "COMPARE": _compare,
    "MEDIAN_COMPARE": _median_compare,
    "TREND_SIGN": _trend_sign,
    "SHARE_COMPARE": _share_compare,
}


def solve(form: SemanticForm, spec: ChartSpec) -> frozenset:
    """Answer set for a grounded semantic form against a chart spec.

    Returns the exact set of answer strings; the empty set signals
    "this question has no usable answer" (caller should skip the
    pair).  Raises :class:`QAError` for references that do not resolve
    against the spec at all.
    """
    op = form.op
    if op == "CHART_TYPE":
        if spec.chart_type not in CHART_TYPES:
            raise QAError(f"unknown chart type {spec.chart_type!r}")
        return frozenset({DISPLAY_NAMES[spec.chart_type]})
    if op in ("ARGMAX", "ARGMIN"):
        return _arg_extreme(form, spec, maximum=op == "ARGMAX")
    if op in ("COUNT_ABOVE", "COUNT_BELOW"):
        return _count_vs_ref(form, spec, above=op == "COUNT_ABOVE")
    if op in ("LABELS_ABOVE", "LABELS_BELOW"):
        return _labels_vs_ref(form, spec, above=op == "LABELS_ABOVE")
    handler = _HANDLERS.get(op)
    if handler is None:
        raise QAError(f"unknown operation {form.op!r}")
    return handler(form, spec)
