"""Planar geometry helpers shared by layout, annotation and evaluation.

All coordinates are SVG user units with the y axis pointing down.
Angles for circular charts are measured in degrees clockwise from the
12 o'clock direction, so a point at angle t on a circle of radius r is
(cx + r*sin(t), cy - r*cos(t)).
"""
from __future__ import annotations

import math

from shapely.geometry import Polygon
from shapely.validation import make_valid

Box = tuple  # (x0, y0, x1, y1)


def polar_point(cx: float, cy: float, r: float, deg: float) -> tuple:
    t = math.radians(deg)
    return (cx + r * math.sin(t), cy - r * math.cos(t))


def arc_points(cx: float, cy: float, r: float,
               start_deg: float, sweep_deg: float) -> list:
    """Points along an arc at one-degree steps, endpoints included.

    A full-circle arc yields 360 points (the seam vertex is not
    duplicated); shorter arcs include both endpoints exactly.
    """
    if sweep_deg >= 360.0 - 1e-9:
        return [polar_point(cx, cy, r, start_deg + k) for k in range(360)]
    steps = int(math.floor(sweep_deg + 1e-9))
    angles = [start_deg + k for k in range(steps + 1)]
    if angles[-1] < start_deg + sweep_deg - 1e-9:
        angles.append(start_deg + sweep_deg)
    return [polar_point(cx, cy, r, a) for a in angles]


def wedge_polygon(cx: float, cy: float, r_inner: float, r_outer: float,
                  start_deg: float, end_deg: float) -> list:
    """Polygon outline of a circular or annular sector.

    The outer arc runs clockwise with a vertex every degree. A filled
    sector (r_inner = 0) closes through the centre point — a full
    circle is a 361-vertex fan — while an annular sector walks the
    inner arc back counter-clockwise.
    """
    sweep = end_deg - start_deg
    if sweep <= 0.0 or sweep > 360.0 + 1e-9:
        raise ValueError(f"invalid angle span {sweep}")
    if not (r_outer > r_inner >= 0.0):
        raise ValueError(f"invalid radii inner={r_inner} outer={r_outer}")
    full = sweep >= 360.0 - 1e-9
    outer = arc_points(cx, cy, r_outer, start_deg, sweep)
    if full:
        outer = outer + [outer[0]]  # close the seam so no slice is lost
    if r_inner <= 0.0:
        return outer + [(cx, cy)]
    inner = arc_points(cx, cy, r_inner, start_deg, sweep)
    if full:
        inner = inner + [inner[0]]
    return outer + inner[::-1]


def polygon_area(points: list) -> float:
    """Absolute shoelace area of a simple polygon."""
    n = len(points)
    acc = 0.0
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


def bounds(points: list) -> Box:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))


def box_area(box: Box) -> float:
    return max(0.0, box[2] - box[0]) * max(0.0, box[3] - box[1])


def box_iou(a: Box, b: Box) -> float:
    ix0 = max(a[0], b[0])
    iy0 = max(a[1], b[1])
    ix1 = min(a[2], b[2])
    iy1 = min(a[3], b[3])
    inter = max(0.0, ix1 - ix0) * max(0.0, iy1 - iy0)
    union = box_area(a) + box_area(b) - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def shapely_polygon(points: list) -> Polygon:
    poly = Polygon(points)
    if not poly.is_valid:
        poly = make_valid(poly)
    return poly


def polygon_iou(a: list, b: list) -> float:
    """Intersection-over-union of two polygons given as vertex lists."""
    pa = shapely_polygon(a)
    pb = shapely_polygon(b)
    inter = pa.intersection(pb).area
    union = pa.union(pb).area
    if union <= 0.0:
        return 0.0
    return inter / union


def clip_polyline_x(points: list, x0: float, x1: float) -> list:
    """Portion of an x-monotone polyline with x in [x0, x1].

    Crossing points at the window edges are linearly interpolated, so
    the clipped path starts exactly at x0 and ends exactly at x1.
    """
    out = []

    def y_at(xa, ya, xb, yb, x):
        if xb == xa:
            return ya
        return ya + (yb - ya) * (x - xa) / (xb - xa)

    for i in range(len(points) - 1):
        (xa, ya), (xb, yb) = points[i], points[i + 1]
        if xb < x0 or xa > x1:
            continue
        sx = max(xa, x0)
        ex = min(xb, x1)
        sy = y_at(xa, ya, xb, yb, sx)
        ey = y_at(xa, ya, xb, yb, ex)
        if not out:
            out.append((sx, sy))
        out.append((ex, ey))
    return out


def thicken_polyline(points: list, half_width: float) -> list:
    """Polygon covering a polyline thickened vertically by half_width.

    The top edge runs left to right at y - half_width and the bottom
    edge returns right to left at y + half_width, so vertical extent at
    every x is exactly the stroke width of an x-monotone path.
    """
    top = [(x, y - half_width) for x, y in points]
    bottom = [(x, y + half_width) for x, y in reversed(points)]
    return top + bottom


def rotate_point(px: float, py: float, cx: float, cy: float,
                 deg: float) -> tuple:
    """Rotate a point around a centre; positive angles turn clockwise
    on screen, matching the SVG rotate() transform with y down."""
    t = math.radians(deg)
    c, s = math.cos(t), math.sin(t)
    dx, dy = px - cx, py - cy
    return (cx + dx * c - dy * s, cy + dx * s + dy * c)


def rotated_box_bounds(box: Box, cx: float, cy: float, deg: float) -> Box:
    """Axis-aligned bounds of a rectangle after rotation about (cx, cy)."""
    corners = [(box[0], box[1]), (box[2], box[1]),
               (box[2], box[3]), (box[0], box[3])]
    pts = [rotate_point(x, y, cx, cy, deg) for x, y in corners]
    return bounds(pts)


def round2(v: float) -> float:
    """Round to the two-decimal precision used in all output files."""
    return round(v + 0.0, 2)


def round2_points(points: list) -> list:
    return [(round2(x), round2(y)) for x, y in points]


def round2_box(box: Box) -> Box:
    return (round2(box[0]), round2(box[1]), round2(box[2]), round2(box[3]))
