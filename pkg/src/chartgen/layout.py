"""Deterministic chart layout.

Turns a ChartSpec into a flat draw list of nodes (rectangles, paths,
text runs) with exact geometry computed from bundled font metrics.
Every node that belongs to one of the twenty annotated element classes
carries its class, its tight box, and (for wedges and line segments)
its polygon mask; purely decorative nodes carry none.

Conventions: the canvas is 800x600 user units, y grows downward, and
circular charts measure angles clockwise from 12 o'clock.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import fontmetrics as fm
from . import geometry as geo
from .errors import RenderError
from .synth import ChartSpec, palette_colors

CANVAS_W = 800
CANVAS_H = 600
MARGIN = 10

TICK_LEN = 4
AXIS_COLOR = "#333333"
TEXT_COLOR = "#222222"
LEGEND_BORDER_COLOR = "#888888"
BOX_STROKE = "#333333"

SWATCH_W = 12
SWATCH_H = 9
MARKER_HALF = 4.5

# Plot areas smaller than this cannot hold the mandatory elements.
MIN_PLOT_W = 120
MIN_PLOT_H = 120

# Number of x tick labels rendered on line charts (data points in
# between stay unlabeled).
LINE_TICK_TARGET = 8

DASH_PATTERNS = {"dashed": "6 4", "dotted": "1.5 3", "dashdot": "6 3 1.5 3"}


@dataclass
class Node:
    """One SVG node plus its annotation payload (if annotated)."""
    tag: str
    attrs: dict
    content: str = ""  # text content for <text> nodes
    element_class: str = ""  # one of the 20 classes, or "" = decoration
    box: tuple = ()  # exact (x0, y0, x1, y1), pre-rounding
    mask: list = field(default_factory=list)
    ann_text: str = ""  # annotated string ("" allowed for box/preview)
    rotation: tuple = ()  # (deg, cx, cy) when the node is rotated text
    run_box: tuple = ()  # metric rectangle of a text run before rotation


@dataclass
class Layout:
    width: int
    height: int
    nodes: list


def nice_ticks(lo: float, hi: float) -> tuple:
    """Tick positions covering [lo, hi] with a 1/2/2.5/5 x 10^k step,
    yielding between 4 and 8 ticks. Returns (ticks, step)."""
    if hi < lo:
        lo, hi = hi, lo
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    k0 = math.floor(math.log10(span / 8.0))
    for k in range(k0, k0 + 5):
        for m in (1.0, 2.0, 2.5, 5.0):
            step = m * (10.0 ** k)
            t0 = math.floor(lo / step) * step
            t1 = math.ceil(hi / step) * step
            count = int(round((t1 - t0) / step)) + 1
            if 4 <= count <= 8:
                return [t0 + i * step for i in range(count)], step
    raise RenderError(f"no tick step found for range [{lo}, {hi}]")


def line_tick_indices(n: int) -> list:
    """Indices of the points that receive x-axis tick labels on a line
    chart: up to LINE_TICK_TARGET evenly spread indices, always
    including the first and last point."""
    m = min(n, LINE_TICK_TARGET)
    if m < 2:
        return list(range(n))
    return sorted({int(round(i * (n - 1) / (m - 1))) for i in range(m)})


def _step_decimals(step: float) -> int:
    d = 0
    while d < 10 and abs(round(step, d) - step) > 1e-9 * max(1.0, abs(step)):
        d += 1
    return d


def format_value(v: float, decimals: int) -> str:
    s = f"{v:.{decimals}f}"
    if float(s) == 0.0:
        s = f"{0.0:.{decimals}f}"  # avoid "-0"
    return s


def _text_node(text: str, x: float, y: float, size: float, family: str,
               anchor: str = "start", element_class: str = "",
               color: str = TEXT_COLOR, rotation: float = 0.0,
               weight: str = "") -> Node:
    """Baseline-anchored text node with its metric box."""
    attrs = {
        "x": x, "y": y,
        "font-family": fm.SVG_FAMILY[family],
        "font-size": size,
        "fill": color,
    }
    if anchor != "start":
        attrs["text-anchor"] = anchor
    if weight:
        attrs["font-weight"] = weight
    box = fm.baseline_box(text, family, size, x, y, anchor)
    run_box = box
    rot = ()
    if rotation:
        attrs["transform"] = f"rotate({format_value(rotation, 2)} " \
                             f"{geo.round2(x)} {geo.round2(y)})"
        box = geo.rotated_box_bounds(box, x, y, rotation)
        rot = (rotation, x, y)
    return Node(tag="text", attrs=attrs, content=text,
                element_class=element_class, box=box, ann_text=text,
                rotation=rot, run_box=run_box)


def _rect_node(x0, y0, x1, y1, fill, stroke="", stroke_width=1.0,
               element_class="", ann_text="", opacity=None) -> Node:
    attrs = {"x": x0, "y": y0, "width": x1 - x0, "height": y1 - y0,
             "fill": fill}
    if stroke:
        attrs["stroke"] = stroke
        attrs["stroke-width"] = stroke_width
    if opacity is not None:
        attrs["fill-opacity"] = opacity
    return Node(tag="rect", attrs=attrs, element_class=element_class,
                box=(x0, y0, x1, y1), ann_text=ann_text)


def _line_node(x0, y0, x1, y1, color, width=1.0, dash="") -> Node:
    attrs = {"x1": x0, "y1": y0, "x2": x1, "y2": y1,
             "stroke": color, "stroke-width": width}
    if dash:
        attrs["stroke-dasharray"] = dash
    return Node(tag="line", attrs=attrs)


def _polygon_node(points, fill, element_class="", opacity=None,
                  stroke="", stroke_width=1.0) -> Node:
    attrs = {"points": list(points), "fill": fill}
    if opacity is not None:
        attrs["fill-opacity"] = opacity
    if stroke:
        attrs["stroke"] = stroke
        attrs["stroke-width"] = stroke_width
    return Node(tag="polygon", attrs=attrs, element_class=element_class,
                box=geo.bounds(points), mask=list(points))


# ---------------------------------------------------------------------------
# Legend


def _legend_entries(spec: ChartSpec) -> list:
    """(label, color) pairs shown in the legend."""
    n = max(len(spec.series), len(spec.category_labels), 1)
    if spec.chart_type in ("pie", "donut"):
        colors = palette_colors(spec.style.palette_id,
                                len(spec.category_labels))
        return list(zip(spec.category_labels, colors))
    if spec.chart_type == "scatter":
        colors = palette_colors(spec.style.palette_id, 1)
        return [(spec.series[1][0], colors[0])]
    colors = palette_colors(spec.style.palette_id, len(spec.series))
    return [(label, colors[j]) for j, (label, _) in enumerate(spec.series)]


def _legend_grid(spec: ChartSpec, avail_w: float) -> dict:
    """Legend geometry: entry cells laid out column-major."""
    style = spec.style
    size = style.font_size
    family = style.font_family
    entries = _legend_entries(spec)
    lh = fm.text_height(size)
    entry_h = lh + 6.0
    pad = 7.0
    label_x_off = SWATCH_W + 5.0
    entry_w = label_x_off + max(fm.text_width(lbl, family, size)
                                for lbl, _ in entries)
    title_w = fm.text_width(spec.legend_title, family, size) if \
        spec.legend_title else 0.0
    title_h = lh + 4.0 if spec.legend_title else 0.0

    placement = style.legend_placement
    if spec.chart_type in ("pie", "donut") and placement.startswith("inside"):
        placement = "outside_right"  # keep the legend clear of pie labels
    if placement == "outside_bottom":
        col_w = entry_w + 14.0
        ncols = max(1, min(len(entries), int((avail_w - 2 * pad) // col_w)))
        nrows = math.ceil(len(entries) / ncols)
    else:
        ncols = 1
        nrows = len(entries)
        col_w = entry_w + 14.0
    used_cols = math.ceil(len(entries) / nrows)
    w = max(used_cols * col_w - 14.0, title_w) + 2 * pad
    h = title_h + nrows * entry_h + 2 * pad - 2.0
    return {"placement": placement, "entries": entries, "w": w, "h": h,
            "pad": pad, "entry_h": entry_h, "col_w": col_w, "nrows": nrows,
            "title_h": title_h, "label_x_off": label_x_off}


def _emit_legend(nodes: list, spec: ChartSpec, grid: dict,
                 x0: float, y0: float) -> None:
    style = spec.style
    size = style.font_size
    family = style.font_family
    pad = grid["pad"]
    x1, y1 = x0 + grid["w"], y0 + grid["h"]
    nodes.append(_rect_node(
        x0, y0, x1, y1, "#ffffff",
        stroke=LEGEND_BORDER_COLOR if style.legend_border else "",
        stroke_width=1.0, element_class="legend_box", ann_text=""))
    cursor_y = y0 + pad
    if spec.legend_title:
        nodes.append(_text_node(
            spec.legend_title, x0 + pad, cursor_y + fm.text_ascent(size),
            size, family, element_class="legend_title", weight="bold"))
        cursor_y += grid["title_h"]
    nrows = grid["nrows"]
    for k, (label, color) in enumerate(grid["entries"]):
        col, row = k // nrows, k % nrows
        ex = x0 + pad + col * grid["col_w"]
        ey = cursor_y + row * grid["entry_h"]
        sw_y = ey + (grid["entry_h"] - 6.0 - SWATCH_H) / 2.0
        nodes.append(_rect_node(ex, sw_y, ex + SWATCH_W, sw_y + SWATCH_H,
                                color, element_class="legend_preview",
                                ann_text=""))
        nodes.append(_text_node(
            label, ex + grid["label_x_off"],
            ey + fm.text_ascent(size), size, family,
            element_class="legend_label"))


# ---------------------------------------------------------------------------
# Shared chrome: title, axis titles, ticks


def _emit_title(nodes: list, spec: ChartSpec) -> float:
    """Emit the chart title; return the y where content may start."""
    style = spec.style
    size = style.font_size + 4
    y = MARGIN + fm.text_ascent(size)
    if style.title_position == "left":
        x, anchor = float(MARGIN), "start"
    elif style.title_position == "right":
        x, anchor = float(CANVAS_W - MARGIN), "end"
    else:
        x, anchor = CANVAS_W / 2.0, "middle"
    nodes.append(_text_node(spec.title, x, y, size, style.font_family,
                            anchor=anchor, element_class="chart_title",
                            weight="bold"))
    return MARGIN + fm.text_height(size) + 8.0


def _x_label_plan(labels, spacing, left_reach, size, family):
    """Rotation plan for category labels along the bottom axis.

    ``spacing`` is the smallest gap between adjacent labelled ticks and
    ``left_reach`` the room available left of the first tick. Labels
    stay horizontal when they fit 0.9 of the spacing; otherwise they
    rotate 45 degrees when the diagonal extent is modest and fits the
    left margin, else 90 degrees. Returns (rotation_deg, band_height).
    """
    lh = fm.text_height(size)
    max_w = max(fm.text_width(t, family, size) for t in labels)
    if max_w <= 0.9 * spacing:
        return 0.0, lh + 4.0
    sin45 = math.sin(math.radians(45.0))
    diag = max_w * sin45
    if spacing >= 1.6 * lh and diag + lh <= 170.0 and \
            diag <= left_reach:
        return -45.0, diag + lh * math.cos(math.radians(45.0)) + 4.0
    if spacing < lh + 2.0:
        raise RenderError("category labels too dense for the plot width")
    return -90.0, max_w + 6.0


def _emit_x_category_labels(nodes, labels, centers, rotation, band_top,
                            size, family):
    for text, cx in zip(labels, centers):
        if rotation == 0.0:
            nodes.append(_text_node(
                text, cx, band_top + fm.text_ascent(size), size, family,
                anchor="middle", element_class="x_axis_label"))
            continue
        # Anchor the label's trailing end at the tick and slide it down
        # so its rotated bounds start at the band top.
        node = _text_node(text, cx, 0.0, size, family, anchor="end",
                          element_class="x_axis_label", rotation=rotation)
        dy = band_top - node.box[1]
        nodes.append(_text_node(text, cx, dy, size, family, anchor="end",
                                element_class="x_axis_label",
                                rotation=rotation))


# ---------------------------------------------------------------------------
# Axis charts (bars, stacked bars, boxes, line, scatter)


def _value_range(spec: ChartSpec):
    ct = spec.chart_type
    if ct in ("grouped_bar_h", "grouped_bar_v"):
        vals = [v for _, vs in spec.series for v in vs]
        if spec.has_error_bars:
            flat = [(v, e) for (_, vs), errs in
                    zip(spec.series, spec.error_values)
                    for v, e in zip(vs, errs)]
            vals = [v - e for v, e in flat] + [v + e for v, e in flat]
        return min(0.0, min(vals)), max(0.0, max(vals))
    if ct in ("stacked_bar_h", "stacked_bar_v"):
        totals = [sum(vs[i] for _, vs in spec.series)
                  for i in range(len(spec.category_labels))]
        return 0.0, max(totals)
    if ct in ("box_h", "box_v"):
        return (min(b.minimum for b in spec.box_stats),
                max(b.maximum for b in spec.box_stats))
    if ct == "line":
        vals = spec.series[0][1]
        return min(vals), max(vals)
    raise RenderError(f"no value range for {ct}")


def _layout_axis_chart(spec: ChartSpec) -> Layout:
    style = spec.style
    size = style.font_size
    family = style.font_family
    nodes = [_rect_node(0, 0, CANVAS_W, CANVAS_H, "#ffffff")]
    content_top = _emit_title(nodes, spec)
    horizontal = spec.chart_type in ("grouped_bar_h", "stacked_bar_h",
                                     "box_h")
    scatter = spec.chart_type == "scatter"
    line = spec.chart_type == "line"

    # Value ticks are data-driven, so both label bands are known before
    # the plot rectangle is fixed.
    if scatter:
        xs, ys = spec.series[0][1], spec.series[1][1]
        x_ticks, x_step = nice_ticks(min(xs), max(xs))
        y_ticks, y_step = nice_ticks(min(ys), max(ys))
        x_tick_labels = [format_value(t, _step_decimals(x_step))
                         for t in x_ticks]
        y_tick_labels = [format_value(t, _step_decimals(y_step))
                         for t in y_ticks]
    else:
        v_ticks, v_step = nice_ticks(*_value_range(spec))
        v_labels = [format_value(t, _step_decimals(v_step))
                    for t in v_ticks]
        if horizontal:
            x_tick_labels = v_labels
            y_tick_labels = list(spec.category_labels)
        else:
            x_tick_labels = list(spec.category_labels)
            y_tick_labels = v_labels

    legend = None
    if spec.show_legend:
        legend = _legend_grid(spec, CANVAS_W - 2 * MARGIN)

    lh = fm.text_height(size)
    y_band_w = max(fm.text_width(t, family, size) for t in y_tick_labels)
    left = MARGIN + y_band_w + TICK_LEN + 8.0
    if spec.y_axis_title:
        left += fm.text_height(size + 2) + 6.0
    right = float(MARGIN)
    if legend and legend["placement"] == "outside_right":
        right += legend["w"] + 10.0
    if scatter or horizontal:
        # Numeric labels sit centred on ticks at the plot edges; keep
        # the outermost labels inside the canvas.
        max_xw = max(fm.text_width(t, family, size) for t in x_tick_labels)
        left = max(left, max_xw / 2.0 + 2.0)
        right = max(right, max_xw / 2.0 + 2.0)
    plot_x0, plot_x1 = left, CANVAS_W - right
    plot_w = plot_x1 - plot_x0
    if plot_w < MIN_PLOT_W:
        raise RenderError("canvas too narrow for labels and legend")

    # Horizontal tick positions are fixed by the widths alone, so the
    # x-label rotation can be planned with exact reach constraints.
    def vx(v, ticks):
        t0, t1 = ticks[0], ticks[-1]
        return plot_x0 + (v - t0) / (t1 - t0) * plot_w

    n = len(spec.category_labels)
    data_x = []
    if scatter:
        x_positions = [vx(t, x_ticks) for t in x_ticks]
    elif horizontal:
        x_positions = [vx(t, v_ticks) for t in v_ticks]
    elif line:
        tick_idx = line_tick_indices(n)
        slot_w = plot_w / n
        data_x = [plot_x0 + (i + 0.5) * slot_w for i in range(n)]
        x_positions = [data_x[i] for i in tick_idx]
        x_tick_labels = [spec.category_labels[i] for i in tick_idx]
    else:
        slot_w = plot_w / n
        x_positions = [plot_x0 + (i + 0.5) * slot_w for i in range(n)]

    if scatter or horizontal:
        x_rot, x_band_h = 0.0, lh + 4.0
    else:
        spacing = min(b - a for a, b in zip(x_positions, x_positions[1:]))
        left_reach = x_positions[0] - 2.0
        x_rot, x_band_h = _x_label_plan(x_tick_labels, spacing, left_reach,
                                        size, family)
        if x_rot == 0.0:
            half = max(fm.text_width(t, family, size)
                       for t in x_tick_labels) / 2.0
            if x_positions[0] - half < 2.0 or \
                    x_positions[-1] + half > CANVAS_W - 2.0:
                x_rot, x_band_h = -90.0, max(
                    fm.text_width(t, family, size)
                    for t in x_tick_labels) + 6.0

    bottom = MARGIN + TICK_LEN + 0.6 * size + x_band_h
    if spec.x_axis_title:
        bottom += fm.text_height(size + 2) + 4.0
    if legend and legend["placement"] == "outside_bottom":
        bottom += legend["h"] + 8.0
    plot_y0, plot_y1 = content_top, CANVAS_H - bottom
    plot_h = plot_y1 - plot_y0
    if plot_h < MIN_PLOT_H:
        raise RenderError("canvas too short for labels and legend")

    def vy(v, ticks):
        t0, t1 = ticks[0], ticks[-1]
        return plot_y1 - (v - t0) / (t1 - t0) * plot_h

    if scatter:
        y_positions = [vy(t, y_ticks) for t in y_ticks]
    elif horizontal:
        slot_h = plot_h / n
        y_positions = [plot_y1 - (i + 0.5) * slot_h for i in range(n)]
    else:
        y_positions = [vy(t, v_ticks) for t in v_ticks]

    if style.grid_style in ("vertical", "both"):
        for gx in x_positions:
            nodes.append(_line_node(gx, plot_y0, gx, plot_y1,
                                    style.grid_color))
    if style.grid_style in ("horizontal", "both"):
        for gy in y_positions:
            nodes.append(_line_node(plot_x0, gy, plot_x1, gy,
                                    style.grid_color))
    nodes.append(_line_node(plot_x0, plot_y0, plot_x0, plot_y1, AXIS_COLOR))
    nodes.append(_line_node(plot_x0, plot_y1, plot_x1, plot_y1, AXIS_COLOR))
    for gx in x_positions:
        nodes.append(_line_node(gx, plot_y1, gx, plot_y1 + TICK_LEN,
                                AXIS_COLOR))
    for gy in y_positions:
        nodes.append(_line_node(plot_x0 - TICK_LEN, gy, plot_x0, gy,
                                AXIS_COLOR))

    # Glyphs.
    if spec.chart_type in ("grouped_bar_v", "grouped_bar_h"):
        _emit_grouped_bars(nodes, spec, horizontal, x_positions,
                           y_positions, vx, vy,
                           v_ticks, plot_w, plot_h)
    elif spec.chart_type in ("stacked_bar_v", "stacked_bar_h"):
        _emit_stacked_bars(nodes, spec, horizontal, x_positions,
                           y_positions, vx, vy, v_ticks, plot_w, plot_h)
    elif spec.chart_type in ("box_v", "box_h"):
        _emit_boxes(nodes, spec, horizontal, x_positions, y_positions,
                    vx, vy, v_ticks, plot_w, plot_h)
    elif line:
        _emit_line(nodes, spec, data_x, x_positions, vy, v_ticks)
    elif scatter:
        _emit_scatter(nodes, spec, vx, vy, x_ticks, y_ticks)

    # Tick labels.
    band_top = plot_y1 + TICK_LEN + 0.6 * size
    if scatter or horizontal:
        for text, gx in zip(x_tick_labels, x_positions):
            nodes.append(_text_node(text, gx,
                                    band_top + fm.text_ascent(size),
                                    size, family, anchor="middle",
                                    element_class="x_axis_label"))
    else:
        _emit_x_category_labels(nodes, x_tick_labels, x_positions, x_rot,
                                band_top, size, family)
    for text, gy in zip(y_tick_labels, y_positions):
        nodes.append(_text_node(
            text, plot_x0 - TICK_LEN - 4.0, gy + 0.3 * size, size, family,
            anchor="end", element_class="y_axis_label"))

    # Axis titles.
    if spec.x_axis_title:
        ty = plot_y1 + TICK_LEN + 0.6 * size + x_band_h + \
            fm.text_ascent(size + 2)
        nodes.append(_text_node(spec.x_axis_title,
                                (plot_x0 + plot_x1) / 2.0, ty, size + 2,
                                family, anchor="middle",
                                element_class="x_axis_title"))
    if spec.y_axis_title:
        tx = MARGIN + fm.text_ascent(size + 2)
        node = _text_node(spec.y_axis_title, tx,
                          (plot_y0 + plot_y1) / 2.0, size + 2, family,
                          anchor="middle", element_class="y_axis_title",
                          rotation=-90.0)
        nodes.append(node)

    # Legend.
    if legend:
        _place_legend(nodes, spec, legend, plot_x0, plot_x1, plot_y0,
                      plot_y1)
    return Layout(CANVAS_W, CANVAS_H, nodes)


def _place_legend(nodes, spec, legend, plot_x0, plot_x1, plot_y0, plot_y1):
    placement = legend["placement"]
    if placement == "outside_right":
        x0 = CANVAS_W - MARGIN - legend["w"]
        y0 = plot_y0
    elif placement == "outside_bottom":
        x0 = (plot_x0 + plot_x1 - legend["w"]) / 2.0
        x0 = max(float(MARGIN), x0)
        y0 = CANVAS_H - MARGIN - legend["h"]
    elif placement == "inside_upper_left":
        x0, y0 = plot_x0 + 8.0, plot_y0 + 8.0
    else:  # inside_upper_right
        x0, y0 = plot_x1 - 8.0 - legend["w"], plot_y0 + 8.0
    _emit_legend(nodes, spec, legend, x0, y0)


def _emit_grouped_bars(nodes, spec, horizontal, x_positions, y_positions,
                       vx, vy, v_ticks, plot_w, plot_h):
    style = spec.style
    n = len(spec.category_labels)
    k = len(spec.series)
    colors = palette_colors(style.palette_id, k)
    cls = "bar_h" if horizontal else "bar_v"
    slot = (plot_h if horizontal else plot_w) / n
    group = slot * style.bar_width_fraction
    bw = group / k
    zero = vx(0.0, v_ticks) if horizontal else vy(0.0, v_ticks)
    for j, (label, values) in enumerate(spec.series):
        errs = spec.error_values[j] if spec.has_error_bars else None
        for i, v in enumerate(values):
            if horizontal:
                y0 = y_positions[i] - group / 2.0 + j * bw
                y1 = y0 + bw
                x_end = vx(v, v_ticks)
                box = (min(zero, x_end), y0, max(zero, x_end), y1)
            else:
                x0 = x_positions[i] - group / 2.0 + j * bw
                x1 = x0 + bw
                y_end = vy(v, v_ticks)
                box = (x0, min(zero, y_end), x1, max(zero, y_end))
            nodes.append(_rect_node(*box, fill=colors[j],
                                    element_class=cls))
            if errs is not None:
                _emit_error_bar(nodes, horizontal, v, errs[i], box, vx, vy,
                                v_ticks, bw)


def _emit_error_bar(nodes, horizontal, v, e, box, vx, vy, v_ticks, bw):
    cap = min(4.0, bw / 3.0)
    if horizontal:
        x_lo, x_hi = vx(v - e, v_ticks), vx(v + e, v_ticks)
        yc = (box[1] + box[3]) / 2.0
        nodes.append(_line_node(x_lo, yc, x_hi, yc, AXIS_COLOR))
        nodes.append(_line_node(x_lo, yc - cap, x_lo, yc + cap, AXIS_COLOR))
        nodes.append(_line_node(x_hi, yc - cap, x_hi, yc + cap, AXIS_COLOR))
    else:
        y_lo, y_hi = vy(v - e, v_ticks), vy(v + e, v_ticks)
        xc = (box[0] + box[2]) / 2.0
        nodes.append(_line_node(xc, y_lo, xc, y_hi, AXIS_COLOR))
        nodes.append(_line_node(xc - cap, y_lo, xc + cap, y_lo, AXIS_COLOR))
        nodes.append(_line_node(xc - cap, y_hi, xc + cap, y_hi, AXIS_COLOR))


def _emit_stacked_bars(nodes, spec, horizontal, x_positions, y_positions,
                       vx, vy, v_ticks, plot_w, plot_h):
    style = spec.style
    n = len(spec.category_labels)
    colors = palette_colors(style.palette_id, len(spec.series))
    cls = "stacked_segment_h" if horizontal else "stacked_segment_v"
    slot = (plot_h if horizontal else plot_w) / n
    bw = slot * style.bar_width_fraction
    for i in range(n):
        cum = 0.0
        for j, (label, values) in enumerate(spec.series):
            v = values[i]
            lo, hi = cum, cum + v
            cum = hi
            if horizontal:
                y0 = y_positions[i] - bw / 2.0
                box = (vx(lo, v_ticks), y0, vx(hi, v_ticks), y0 + bw)
            else:
                x0 = x_positions[i] - bw / 2.0
                box = (x0, vy(hi, v_ticks), x0 + bw, vy(lo, v_ticks))
            nodes.append(_rect_node(*box, fill=colors[j],
                                    element_class=cls))


def _emit_boxes(nodes, spec, horizontal, x_positions, y_positions, vx, vy,
                v_ticks, plot_w, plot_h):
    style = spec.style
    n = len(spec.category_labels)
    colors = palette_colors(style.palette_id, n)
    cls = "box_glyph_h" if horizontal else "box_glyph_v"
    slot = (plot_h if horizontal else plot_w) / n
    bw = slot * style.bar_width_fraction
    cap = bw / 2.0
    f = geo.round2
    for i, st in enumerate(spec.box_stats):
        if horizontal:
            yc = y_positions[i]
            xs = {k: vx(getattr(st, k), v_ticks)
                  for k in ("minimum", "q1", "median", "q3", "maximum")}
            d = (
                f"M {f(xs['minimum'])} {f(yc - cap / 2)} "
                f"L {f(xs['minimum'])} {f(yc + cap / 2)} "
                f"M {f(xs['minimum'])} {f(yc)} L {f(xs['q1'])} {f(yc)} "
                f"M {f(xs['q3'])} {f(yc)} L {f(xs['maximum'])} {f(yc)} "
                f"M {f(xs['maximum'])} {f(yc - cap / 2)} "
                f"L {f(xs['maximum'])} {f(yc + cap / 2)} "
                f"M {f(xs['q1'])} {f(yc - bw / 2)} "
                f"L {f(xs['q3'])} {f(yc - bw / 2)} "
                f"L {f(xs['q3'])} {f(yc + bw / 2)} "
                f"L {f(xs['q1'])} {f(yc + bw / 2)} Z "
                f"M {f(xs['median'])} {f(yc - bw / 2)} "
                f"L {f(xs['median'])} {f(yc + bw / 2)}"
            )
            box = (xs["minimum"], yc - bw / 2.0, xs["maximum"],
                   yc + bw / 2.0)
        else:
            xc = x_positions[i]
            ys = {k: vy(getattr(st, k), v_ticks)
                  for k in ("minimum", "q1", "median", "q3", "maximum")}
            d = (
                f"M {f(xc - cap / 2)} {f(ys['minimum'])} "
                f"L {f(xc + cap / 2)} {f(ys['minimum'])} "
                f"M {f(xc)} {f(ys['minimum'])} L {f(xc)} {f(ys['q1'])} "
                f"M {f(xc)} {f(ys['q3'])} L {f(xc)} {f(ys['maximum'])} "
                f"M {f(xc - cap / 2)} {f(ys['maximum'])} "
                f"L {f(xc + cap / 2)} {f(ys['maximum'])} "
                f"M {f(xc - bw / 2)} {f(ys['q1'])} "
                f"L {f(xc + bw / 2)} {f(ys['q1'])} "
                f"L {f(xc + bw / 2)} {f(ys['q3'])} "
                f"L {f(xc - bw / 2)} {f(ys['q3'])} Z "
                f"M {f(xc - bw / 2)} {f(ys['median'])} "
                f"L {f(xc + bw / 2)} {f(ys['median'])}"
            )
            box = (xc - bw / 2.0, ys["maximum"], xc + bw / 2.0,
                   ys["minimum"])
        attrs = {"d": d, "fill": colors[i], "fill-opacity": 0.55,
                 "stroke": BOX_STROKE, "stroke-width": 1.2}
        nodes.append(Node(tag="path", attrs=attrs, element_class=cls,
                          box=box))


def _emit_line(nodes, spec, data_x, tick_x, vy, v_ticks):
    style = spec.style
    color = palette_colors(style.palette_id, 1)[0]
    values = spec.series[0][1]
    pts = [(x, vy(v, v_ticks)) for x, v in zip(data_x, values)]
    half = style.line_width / 2.0
    solid = style.line_style == "solid"
    for k in range(len(tick_x) - 1):
        sub = geo.clip_polyline_x(pts, tick_x[k], tick_x[k + 1])
        poly = geo.thicken_polyline(sub, half)
        nodes.append(_polygon_node(
            poly, color, element_class="line_segment",
            opacity=None if solid else 0.25))
    if not solid:
        attrs = {
            "points": pts, "fill": "none", "stroke": color,
            "stroke-width": style.line_width,
            "stroke-dasharray": DASH_PATTERNS[style.line_style],
        }
        nodes.append(Node(tag="polyline", attrs=attrs))


def _marker_node(mx, my, marker, color) -> Node:
    h = MARKER_HALF
    box = (mx - h, my - h, mx + h, my + h)
    if marker == "circle":
        attrs = {"cx": mx, "cy": my, "r": h, "fill": color}
        return Node(tag="circle", attrs=attrs,
                    element_class="scatter_marker", box=box)
    if marker == "square":
        return _rect_node(mx - h, my - h, mx + h, my + h, color,
                          element_class="scatter_marker")
    if marker == "diamond":
        pts = [(mx, my - h), (mx + h, my), (mx, my + h), (mx - h, my)]
    elif marker == "triangle_up":
        pts = [(mx, my - h), (mx + h, my + h), (mx - h, my + h)]
    else:  # cross
        f = geo.round2
        d = (f"M {f(mx - h)} {f(my)} L {f(mx + h)} {f(my)} "
             f"M {f(mx)} {f(my - h)} L {f(mx)} {f(my + h)}")
        attrs = {"d": d, "fill": "none", "stroke": color,
                 "stroke-width": 2.0}
        return Node(tag="path", attrs=attrs,
                    element_class="scatter_marker", box=box)
    node = _polygon_node(pts, color, element_class="scatter_marker")
    node.mask = []  # markers are box-annotated, not mask-annotated
    node.box = box
    return node


def _emit_scatter(nodes, spec, vx, vy, x_ticks, y_ticks):
    style = spec.style
    color = palette_colors(style.palette_id, 1)[0]
    xs, ys = spec.series[0][1], spec.series[1][1]
    for x, y in zip(xs, ys):
        nodes.append(_marker_node(vx(x, x_ticks), vy(y, y_ticks),
                                  style.marker_style, color))


# ---------------------------------------------------------------------------
# Circular charts


def _layout_circular(spec: ChartSpec) -> Layout:
    style = spec.style
    size = style.font_size
    family = style.font_family
    nodes = [_rect_node(0, 0, CANVAS_W, CANVAS_H, "#ffffff")]
    content_top = _emit_title(nodes, spec)

    legend = _legend_grid(spec, CANVAS_W - 2 * MARGIN) if \
        spec.show_legend else None
    left, right = float(MARGIN), float(MARGIN)
    bottom = float(MARGIN)
    if legend and legend["placement"] == "outside_right":
        right += legend["w"] + 10.0
    if legend and legend["placement"] == "outside_bottom":
        bottom += legend["h"] + 8.0
    plot_x0, plot_x1 = left, CANVAS_W - right
    plot_y0, plot_y1 = content_top + 4.0, CANVAS_H - bottom
    if plot_x1 - plot_x0 < MIN_PLOT_W or plot_y1 - plot_y0 < MIN_PLOT_H:
        raise RenderError("canvas too small for pie and legend")

    values = list(spec.series[0][1])
    labels = list(spec.category_labels)
    total = sum(values)
    colors = palette_colors(style.palette_id, len(labels))
    lh = fm.text_height(size)
    block_h = 2.0 * size + 2.0
    max_label_w = max(
        max(fm.text_width(t, family, size) for t in labels),
        fm.text_width("100.0%", family, size))

    cx = (plot_x0 + plot_x1) / 2.0
    cy = (plot_y0 + plot_y1) / 2.0
    half_w = (plot_x1 - plot_x0) / 2.0
    half_h = (plot_y1 - plot_y0) / 2.0
    r = min(style.pie_outer_radius,
            half_w - max_label_w - 26.0,
            half_h - block_h - 16.0)
    if r < 50.0:
        raise RenderError("no room for pie labels at any usable radius")
    r_inner = r * style.pie_inner_radius_fraction

    # Wedges, clockwise from 12 o'clock in category order.
    angle = 0.0
    mids = []
    for i, v in enumerate(values):
        sweep = 360.0 * v / total
        poly = geo.wedge_polygon(cx, cy, r_inner, r, angle, angle + sweep)
        mids.append(angle + sweep / 2.0)
        angle += sweep
        nodes.append(_polygon_node(poly, colors[i], element_class="wedge",
                                   stroke="#ffffff", stroke_width=1.0))

    # Labels and percentage values sit in two columns flanking the pie,
    # pushed apart vertically so no two blocks collide.
    sides = {"right": [], "left": []}
    for i, mid in enumerate(mids):
        t = math.radians(mid)
        side = "right" if math.sin(t) >= 0.0 else "left"
        desired = cy - math.cos(t) * (r + 14.0) - block_h / 2.0
        sides[side].append((desired, i))
    top_lim = plot_y0 + 4.0
    bot_lim = plot_y1 - 4.0
    for side, items in sides.items():
        items.sort()
        placed = []
        cursor = top_lim
        for desired, i in items:
            y = max(desired, cursor)
            placed.append((y, i))
            cursor = y + block_h + 4.0
        overflow = (placed[-1][0] + block_h) - bot_lim if placed else 0.0
        if overflow > 0.0:
            placed = [(y - overflow, i) for y, i in placed]
        if placed and placed[0][0] < top_lim:
            raise RenderError("pie labels do not fit the canvas")
        x = cx + r + 14.0 if side == "right" else cx - r - 14.0
        anchor = "start" if side == "right" else "end"
        for y, i in placed:
            share = 100.0 * values[i] / total
            nodes.append(_text_node(labels[i], x, y + fm.text_ascent(size),
                                    size, family, anchor=anchor,
                                    element_class="pie_label"))
            nodes.append(_text_node(f"{share:.1f}%", x,
                                    y + size + 2.0 + fm.text_ascent(size),
                                    size, family, anchor=anchor,
                                    element_class="pie_value"))

    if legend:
        _place_legend(nodes, spec, legend, plot_x0, plot_x1, plot_y0,
                      plot_y1)
    return Layout(CANVAS_W, CANVAS_H, nodes)


def layout(spec: ChartSpec) -> Layout:
    """Lay out a chart: every glyph and text run gets its rectangle."""
    if spec.chart_type in ("pie", "donut"):
        out = _layout_circular(spec)
    else:
        out = _layout_axis_chart(spec)
    _check_containment(out)
    _check_text_overlap(out)
    return out


def _check_containment(out: Layout) -> None:
    for node in out.nodes:
        if not node.element_class or not node.box:
            continue
        x0, y0, x1, y1 = node.box
        if x0 < -0.01 or y0 < -0.01 or x1 > out.width + 0.01 or \
                y1 > out.height + 0.01:
            raise RenderError(
                f"{node.element_class} box {node.box} leaves the canvas")


def _run_corners(node: Node) -> list:
    x0, y0, x1, y1 = node.run_box
    pts = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    if node.rotation:
        deg, px, py = node.rotation
        pts = [geo.rotate_point(x, y, px, py, deg) for x, y in pts]
    return pts


def _check_text_overlap(out: Layout) -> None:
    """No text run may intersect another (exact rotated rectangles)."""
    runs = [n for n in out.nodes if n.tag == "text" and n.content]
    for i, a in enumerate(runs):
        for b in runs[i + 1:]:
            ax0, ay0, ax1, ay1 = a.box
            bx0, by0, bx1, by1 = b.box
            if ax1 <= bx0 or bx1 <= ax0 or ay1 <= by0 or by1 <= ay0:
                continue  # axis-aligned bounds are disjoint
            pa = geo.shapely_polygon(_run_corners(a))
            pb = geo.shapely_polygon(_run_corners(b))
            if pa.intersection(pb).area > 1e-6:
                raise RenderError(
                    f"text {a.content!r} ({a.element_class}) overlaps "
                    f"{b.content!r} ({b.element_class})")
