"""Question and answer encoding over ordered chart elements.

Text elements are addressed position-independently as ``(element_type,
element_order)`` pairs: categories left-to-right, value labels
bottom-to-top, legend entries top-to-bottom then left-to-right, pie
labels clockwise from 12 o'clock.  Horizontal bar/box charts are first
normalized by an axis-swap correction — detected from the geometry of
the bars themselves — so the category axis always plays the x-label
role, exactly as in the chart's vertical twin.

On top of that ordering sit four codecs:

- :func:`attach_text` gives detected text boxes their strings from the
  maximum-overlap ground-truth box (or any text provider, e.g. an OCR
  simulator).
- :func:`encode_question` replaces chart strings inside a question by
  reserved rare-word tokens, longest string first.
- :func:`encode_answer` / :func:`decode_answer` convert answer strings
  to and from a fixed 75-slot multi-hot vector.

Slot layout: [0-19] category labels, [20-34] legend labels, [35]
chart title, [36] x-axis title, [37] y-axis title, [38] legend title,
[39-48] the ten chart types, [49-53] Yes/No/None/negative/positive,
[54-68] numerals "1"-"15", [69-74] reserved (always zero).
"""

from __future__ import annotations

import json
import warnings
from functools import lru_cache
from importlib import resources

import numpy as np

from .annotate import AnnotationSet, MASKED_CLASSES, TEXT_CLASSES
from .errors import DecodeError, EncodeError
from .geometry import box_iou
from .synth import CHART_TYPES, CIRCULAR_TYPES, DISPLAY_NAMES

ELEMENT_TYPES = (
    "x_label", "y_label", "legend_label", "legend_title", "pie_label",
    "pie_value", "chart_title", "x_axis_title", "y_axis_title",
)

# How many distinct orders each element type can have a token for.
TOKEN_CAPS = {
    "x_label": 20, "y_label": 20, "legend_label": 15, "legend_title": 1,
    "pie_label": 20, "pie_value": 20, "chart_title": 1,
    "x_axis_title": 1, "y_axis_title": 1,
}

VECTOR_SIZE = 75
CATEGORY_SLOTS = 20      # slots 0-19
LEGEND_SLOTS = 15        # slots 20-34
TITLE_SLOT = {"chart_title": 35, "x_axis_title": 36, "y_axis_title": 37,
              "legend_title": 38}
CHART_TYPE_BASE = 39     # slots 39-48 in CHART_TYPES order
COMMON_WORDS = ("Yes", "No", "None", "negative", "positive")
COMMON_BASE = 49         # slots 49-53
NUMERAL_BASE = 54        # slots 54-68 for "1".."15"
MAX_NUMERAL = 15
RESERVED_BASE = 69       # slots 69-74 always zero

# When one string is rendered by several elements, questions/answers
# bind to the most specific one, in this fixed preference order.
KEY_PREFERENCE = (
    "legend_title", "chart_title", "x_axis_title", "y_axis_title",
    "legend_label", "pie_label", "x_label", "y_label", "pie_value",
)

SWAP_CLASSES = ("bar_v", "bar_h", "stacked_segment_v",
                 "stacked_segment_h", "box_glyph_v", "box_glyph_h")

ATTACH_MIN_IOU = 0.5


class ReservedTokenMap:
    """Bijection between element keys and bundled rare words.

    The assignment is static — the same key maps to the same token in
    every chart — so encoded questions are comparable corpus-wide.
    """

    def __init__(self, words):
        need = sum(TOKEN_CAPS[t] for t in ELEMENT_TYPES)
        words = list(words)
        if len(set(words)) != len(words):
            raise EncodeError("token word list contains duplicates")
        if len(words) < need:
            raise EncodeError(f"token word list has {len(words)} words; "
                              f"{need} keys need one each")
        self._by_key = {}
        i = 0
        for etype in ELEMENT_TYPES:
            for order in range(TOKEN_CAPS[etype]):
                self._by_key[(etype, order)] = words[i]
                i += 1
        self._by_token = {v: k for k, v in self._by_key.items()}

    def token_for(self, key: tuple) -> str:
        try:
            return self._by_key[key]
        except KeyError:
            raise EncodeError(f"no reserved token for element {key!r}")

    def key_for(self, token: str) -> tuple:
        try:
            return self._by_token[token]
        except KeyError:
            raise EncodeError(f"not a reserved token: {token!r}")

    def __contains__(self, key) -> bool:
        return key in self._by_key

    def items(self):
        return self._by_key.items()


@lru_cache(maxsize=1)
def default_token_map() -> ReservedTokenMap:
    raw = json.loads(resources.files("chartgen.data")
                     .joinpath("rare_words.json").read_text("utf-8"))
    return ReservedTokenMap(raw["words"])


def _as_items(annotations) -> list:
    """Normalize input to (element_class, box, text) triples."""
    if isinstance(annotations, AnnotationSet):
        return [(a.element_class, a.box, a.text) for a in
                annotations.elements]
    out = []
    for item in annotations:
        cls, box, text = item[0], item[1], item[2]
        out.append((cls, tuple(box), text))
    return out


def detect_axis_swap(annotations) -> bool:
    """True when bar/box geometry says the category axis is horizontal.

    Horizontal charts stretch their glyphs along x with a constant
    thickness, so the widths vary and the heights do not; the reverse
    holds for vertical charts.  Ties (including single-glyph charts)
    default to no swap; charts without bar/box glyphs warn and default
    to no swap.
    """
    widths, heights = [], []
    for cls, box, _ in _as_items(annotations):
        if cls in SWAP_CLASSES:
            widths.append(box[2] - box[0])
            heights.append(box[3] - box[1])
    if not widths:
        warnings.warn("no bar or box elements; assuming no axis swap",
                      stacklevel=2)
        return False
    return float(np.var(widths)) > float(np.var(heights))


def _center(box) -> tuple:
    return ((box[0] + box[2]) / 2.0, (box[1] + box[3]) / 2.0)


def _clockwise_angle(center: tuple, point: tuple) -> float:
    """Degrees clockwise from 12 o'clock, in [0, 360)."""
    dx = point[0] - center[0]
    dy = point[1] - center[1]
    return float(np.degrees(np.arctan2(dx, -dy))) % 360.0


def order_elements(annotations, swap: bool = False) -> dict:
    """Ordered map ``(element_type, order) -> (text, box)``.

    Sort rules: x-axis labels left-to-right, y-axis labels bottom-to-
    top, legend labels top-to-bottom then left-to-right (column-major),
    pie labels/values clockwise from 12 o'clock around the wedge
    center.  With ``swap`` set, x- and y-axis label roles are exchanged
    before ordering, which restores category labels of horizontal
    charts to the x-label role.  Output order is a pure function of the
    geometry — input order never matters.
    """
    items = _as_items(annotations)
    wedge_centers = [_center(box) for cls, box, _ in items
                     if cls == "wedge"]
    if wedge_centers:
        pie_center = (sum(c[0] for c in wedge_centers) / len(wedge_centers),
                      sum(c[1] for c in wedge_centers) / len(wedge_centers))
    else:
        label_centers = [_center(box) for cls, box, _ in items
                         if cls in ("pie_label", "pie_value")]
        if label_centers:
            pie_center = (
                sum(c[0] for c in label_centers) / len(label_centers),
                sum(c[1] for c in label_centers) / len(label_centers))
        else:
            pie_center = (0.0, 0.0)

    buckets = {}
    for cls, box, text in items:
        if cls == "x_axis_label":
            etype = "y_label" if swap else "x_label"
            key = (_center(box)[0],)  # left to right
        elif cls == "y_axis_label":
            etype = "x_label" if swap else "y_label"
            key = (-_center(box)[1],)  # bottom to top
        elif cls == "legend_label":
            etype = "legend_label"
            cx, cy = _center(box)
            key = (cx, cy)  # columns left to right, top-down inside
        elif cls in ("pie_label", "pie_value"):
            etype = cls
            key = (_clockwise_angle(pie_center, _center(box)),)
        elif cls in ("legend_title", "chart_title", "x_axis_title",
                     "y_axis_title"):
            etype = cls
            key = _center(box)
        else:
            continue  # plot glyphs and textless legend furniture
        buckets.setdefault(etype, []).append((key, text, box))

    ordered = {}
    for etype in ELEMENT_TYPES:
        entries = sorted(buckets.get(etype, ()), key=lambda e: e[0])
        for order, (_, text, box) in enumerate(entries):
            ordered[(etype, order)] = (text, box)
    return ordered


def attach_text(detections, truth: AnnotationSet,
                text_provider=None, min_iou: float = ATTACH_MIN_IOU):
    """Give detected text boxes their strings from ground truth.

    ``detections`` are ``(element_class, box, score)`` triples.  Pairs
    of (detection, unassigned truth box of any text class) are matched
    greedily by descending IoU; a detection takes the string of its
    matched truth box when the IoU reaches ``min_iou``.  Unmatched
    detections keep an empty string.  A ``text_provider`` callable maps
    each matched truth string before attachment (identity when absent),
    which is how OCR noise is injected.

    Returns ``(element_class, box, text)`` triples, detection order
    preserved.
    """
    dets = [(cls, tuple(box), score) for cls, box, score in detections]
    truth_boxes = [(a.text, a.box) for a in truth.elements
                   if a.element_class in TEXT_CLASSES and a.has_text]
    scored = []
    for di, (cls, box, _) in enumerate(dets):
        if cls not in TEXT_CLASSES:
            continue
        for ti, (_, tbox) in enumerate(truth_boxes):
            iou = box_iou(box, tbox)
            if iou >= min_iou:
                scored.append((-iou, di, ti))
    scored.sort()
    texts = [""] * len(dets)
    used_dets = set()
    used_truth = set()
    for neg_iou, di, ti in scored:
        if di in used_dets or ti in used_truth:
            continue
        used_dets.add(di)
        used_truth.add(ti)
        text = truth_boxes[ti][0]
        texts[di] = text_provider(text) if text_provider else text
    return [(cls, box, texts[i]) for i, (cls, box, _) in enumerate(dets)]


def encode_question(question: str, ordered: dict,
                    tokens: ReservedTokenMap) -> str:
    """Replace chart strings in a question by their reserved tokens.

    Strings are tried longest first; each occurrence is matched
    case-sensitively and exactly, left to right, and matched spans are
    never re-matched by shorter strings.  Tokens are rare words, so the
    encoding is idempotent.  Text the chart does not contain passes
    through unchanged.
    """
    pref = {t: i for i, t in enumerate(KEY_PREFERENCE)}
    by_text = {}
    for key, (text, _) in ordered.items():
        if not text:
            continue
        best = by_text.get(text)
        rank = (pref[key[0]], key[1])
        if best is None or rank < best[0]:
            by_text[text] = (rank, key)
    candidates = sorted(by_text.items(),
                        key=lambda kv: (-len(kv[0]), kv[0]))

    claimed = []  # (start, end, token) spans over the original question

    def overlaps(start, end):
        return any(s < end and start < e for s, e, _ in claimed)

    for text, (_, key) in candidates:
        if key not in tokens:
            continue
        token = tokens.token_for(key)
        pos = 0
        while True:
            found = question.find(text, pos)
            if found < 0:
                break
            end = found + len(text)
            if not overlaps(found, end):
                claimed.append((found, end, token))
            pos = end
    claimed.sort()
    out = []
    cursor = 0
    for start, end, token in claimed:
        out.append(question[cursor:start])
        out.append(token)
        cursor = end
    out.append(question[cursor:])
    return "".join(out)


def _element_slot(key: tuple) -> int | None:
    etype, order = key
    if etype in ("x_label", "pie_label"):
        return order if order < CATEGORY_SLOTS else None
    if etype == "legend_label":
        return CATEGORY_SLOTS + order if order < LEGEND_SLOTS else None
    if etype in TITLE_SLOT and order == 0:
        return TITLE_SLOT[etype]
    return None


def encode_answer(answers, ordered: dict, chart_type: str) -> list:
    """Multi-hot 75-slot vector for a set of answer strings.

    Resolution order per answer: chart string (through the element
    keys, most specific first), chart-type display name, common word,
    numeral.  A string matching none of these raises
    :class:`EncodeError` naming it — answers are never dropped
    silently.
    """
    if chart_type not in CHART_TYPES:
        raise EncodeError(f"unknown chart type {chart_type!r}")
    pref = {t: i for i, t in enumerate(KEY_PREFERENCE)}
    vector = [0] * VECTOR_SIZE
    type_slot = {DISPLAY_NAMES[ct]: CHART_TYPE_BASE + i
                 for i, ct in enumerate(CHART_TYPES)}
    for answer in sorted(answers):
        slot = None
        matches = sorted(
            (key for key, (text, _) in ordered.items() if text == answer),
            key=lambda k: (pref[k[0]], k[1]))
        for key in matches:
            slot = _element_slot(key)
            if slot is not None:
                break
        if slot is None and answer in type_slot:
            slot = type_slot[answer]
        if slot is None and answer in COMMON_WORDS:
            slot = COMMON_BASE + COMMON_WORDS.index(answer)
        if slot is None and answer.isdigit():
            value = int(answer)
            if 1 <= value <= MAX_NUMERAL and answer == str(value):
                slot = NUMERAL_BASE + value - 1
        if slot is None:
            raise EncodeError(f"answer {answer!r} is not encodable for "
                              f"this {chart_type} chart")
        vector[slot] = 1
    return vector


def decode_answer(vector, ordered: dict) -> str:
    """String for the highest-scoring slot of a 75-dimensional vector.

    Ties break toward the lowest slot index.  Element slots map back
    through the ordered element map; a set slot whose element is
    missing from the map decodes to "" (the pipeline's signal for "the
    parser never found that element").  An argmax on a reserved slot
    raises :class:`DecodeError`.
    """
    scores = np.asarray(list(vector), dtype=float)
    if scores.shape != (VECTOR_SIZE,):
        raise DecodeError(f"expected {VECTOR_SIZE} scores, got "
                          f"{scores.shape}")
    if not np.all(np.isfinite(scores)):
        raise DecodeError("answer vector contains non-finite scores")
    slot = int(np.argmax(scores))
    if slot >= RESERVED_BASE:
        raise DecodeError(f"argmax slot {slot} is reserved")
    if slot < CATEGORY_SLOTS:
        etypes = ("pie_label",) if any(
            k[0] == "pie_label" for k in ordered) else ("x_label",)
        for etype in etypes:
            entry = ordered.get((etype, slot))
            if entry is not None:
                return entry[0]
        return ""
    if slot < CATEGORY_SLOTS + LEGEND_SLOTS:
        entry = ordered.get(("legend_label", slot - CATEGORY_SLOTS))
        return entry[0] if entry is not None else ""
    for etype, tslot in TITLE_SLOT.items():
        if slot == tslot:
            entry = ordered.get((etype, 0))
            return entry[0] if entry is not None else ""
    if CHART_TYPE_BASE <= slot < COMMON_BASE:
        return DISPLAY_NAMES[CHART_TYPES[slot - CHART_TYPE_BASE]]
    if COMMON_BASE <= slot < NUMERAL_BASE:
        return COMMON_WORDS[slot - COMMON_BASE]
    return str(slot - NUMERAL_BASE + 1)
