"""SVG 1.1 serialization of a laid-out chart.

Output is deterministic byte-for-byte: attribute order is fixed,
floats are printed with exactly two decimals, and annotated nodes get
stable ``el<k>`` ids in draw order (k matches the annotation's
order_hint).
"""
from __future__ import annotations

from xml.sax.saxutils import escape

from .layout import Layout


def fmt(value) -> str:
    """Format an attribute value; floats get exactly two decimals."""
    if isinstance(value, float):
        s = f"{value:.2f}"
        return "0.00" if s == "-0.00" else s
    return str(value)


def _fmt_points(points) -> str:
    return " ".join(f"{fmt(float(x))},{fmt(float(y))}" for x, y in points)


def _serialize(node, node_id: str) -> str:
    parts = [f"<{node.tag}"]
    if node_id:
        parts.append(f' id="{node_id}"')
    for key, value in node.attrs.items():
        if key == "points":
            text = _fmt_points(value)
        else:
            text = fmt(value)
        text = escape(text, {'"': "&quot;"})
        parts.append(f' {key}="{text}"')
    if node.tag == "text":
        parts.append(f">{escape(node.content)}</text>")
    else:
        parts.append("/>")
    return "".join(parts)


def render_svg(layout: Layout, spec=None) -> bytes:
    """Serialize a layout to SVG bytes. Every annotated node carries a
    stable id; decorative nodes carry none."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{layout.width}" height="{layout.height}" '
        f'viewBox="0 0 {layout.width} {layout.height}">',
    ]
    k = 0
    for node in layout.nodes:
        node_id = ""
        if node.element_class:
            node_id = f"el{k}"
            k += 1
        lines.append(_serialize(node, node_id))
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def rasterize(svg_bytes: bytes, hook) -> bytes:
    """Delegate raster output to an external SVG rasterizer.

    ``hook`` is any callable taking SVG bytes and returning image
    bytes (for example a wrapper around resvg or rsvg-convert); no
    rasterizer is bundled.
    """
    return hook(svg_bytes)
