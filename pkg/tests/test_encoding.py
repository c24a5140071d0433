import dataclasses
import random

import numpy as np
import pytest

from chartgen.annotate import annotate
from chartgen.encoding import (
    ATTACH_MIN_IOU,
    CHART_TYPE_BASE,
    COMMON_BASE,
    COMMON_WORDS,
    ELEMENT_TYPES,
    KEY_PREFERENCE,
    NUMERAL_BASE,
    RESERVED_BASE,
    SWAP_CLASSES,
    TOKEN_CAPS,
    VECTOR_SIZE,
    ReservedTokenMap,
    attach_text,
    decode_answer,
    default_token_map,
    detect_axis_swap,
    encode_answer,
    encode_question,
    order_elements,
)
from chartgen.errors import DecodeError, EncodeError
from chartgen.layout import layout
from chartgen.synth import CHART_TYPES, DISPLAY_NAMES


def box_at(cx, cy, w=40.0, h=12.0):
    return (cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)


# ---------------------------------------------------------------------------
# Reserved token map


def test_default_token_map_is_bijective():
    tokens = default_token_map()
    keys = list(dict(tokens.items()))
    assert len(keys) == sum(TOKEN_CAPS[t] for t in ELEMENT_TYPES) == 99
    words = [tokens.token_for(k) for k in keys]
    assert len(set(words)) == len(words)
    for key, word in zip(keys, words):
        assert tokens.key_for(word) == key
        assert key in tokens
    assert ("x_label", TOKEN_CAPS["x_label"]) not in tokens


def test_token_map_errors():
    with pytest.raises(EncodeError):
        ReservedTokenMap(["abc", "abc"] + [f"w{i}" for i in range(200)])
    with pytest.raises(EncodeError):
        ReservedTokenMap([f"w{i}" for i in range(10)])
    tokens = default_token_map()
    with pytest.raises(EncodeError):
        tokens.token_for(("x_label", 99))
    with pytest.raises(EncodeError):
        tokens.key_for("definitely-not-a-token")


# ---------------------------------------------------------------------------
# Element ordering


AXIS_ITEMS = [
    ("chart_title", box_at(400, 20, 200), "Yearly Output"),
    ("x_axis_title", box_at(400, 580, 100), "Region"),
    ("y_axis_title", box_at(15, 300, 12, 80), "Tonnes"),
    ("x_axis_label", box_at(300, 540), "Mid"),
    ("x_axis_label", box_at(100, 540), "West"),
    ("x_axis_label", box_at(500, 540), "East"),
    ("y_axis_label", box_at(40, 100), "100"),
    ("y_axis_label", box_at(40, 500), "0"),
    ("y_axis_label", box_at(40, 300), "50"),
    ("legend_title", box_at(650, 80), "Product"),
    ("legend_label", box_at(640, 130), "Alpha"),
    ("legend_label", box_at(640, 160), "Beta"),
    ("legend_label", box_at(720, 130), "Gamma"),
    ("bar_v", (90, 200, 110, 520), ""),
]


def test_order_elements_axis_chart():
    ordered = order_elements(AXIS_ITEMS)
    texts = {k: v[0] for k, v in ordered.items()}
    assert texts[("x_label", 0)] == "West"
    assert texts[("x_label", 1)] == "Mid"
    assert texts[("x_label", 2)] == "East"
    # Value labels run bottom-to-top.
    assert texts[("y_label", 0)] == "0"
    assert texts[("y_label", 1)] == "50"
    assert texts[("y_label", 2)] == "100"
    # Legend entries are column-major: left column first, top-down.
    assert texts[("legend_label", 0)] == "Alpha"
    assert texts[("legend_label", 1)] == "Beta"
    assert texts[("legend_label", 2)] == "Gamma"
    assert texts[("legend_title", 0)] == "Product"
    assert texts[("chart_title", 0)] == "Yearly Output"
    assert texts[("x_axis_title", 0)] == "Region"
    assert texts[("y_axis_title", 0)] == "Tonnes"
    assert ("pie_label", 0) not in ordered


def test_order_elements_input_order_invariant():
    baseline = order_elements(AXIS_ITEMS)
    rng = random.Random(4)
    for _ in range(5):
        shuffled = AXIS_ITEMS[:]
        rng.shuffle(shuffled)
        assert order_elements(shuffled) == baseline


def test_order_elements_swap_exchanges_axis_roles():
    ordered = order_elements(AXIS_ITEMS, swap=True)
    texts = {k: v[0] for k, v in ordered.items()}
    # Former y-axis labels (bottom-to-top) now fill the x-label role.
    assert [texts[("x_label", i)] for i in range(3)] == ["0", "50", "100"]
    assert [texts[("y_label", i)] for i in range(3)] == \
        ["West", "Mid", "East"]


def test_order_elements_pie_clockwise():
    items = [
        ("wedge", (300, 200, 500, 400), ""),
        ("pie_label", box_at(400, 150), "Top"),
        ("pie_label", box_at(550, 300), "Right"),
        ("pie_label", box_at(400, 450), "Bottom"),
        ("pie_label", box_at(250, 300), "Left"),
        ("pie_value", box_at(545, 320), "25%"),
        ("pie_value", box_at(255, 320), "40%"),
    ]
    ordered = order_elements(items)
    texts = {k: v[0] for k, v in ordered.items()}
    assert [texts[("pie_label", i)] for i in range(4)] == \
        ["Top", "Right", "Bottom", "Left"]
    # Values share the clock: right-side value precedes left-side one.
    assert texts[("pie_value", 0)] == "25%"
    assert texts[("pie_value", 1)] == "40%"


def test_order_elements_pie_center_fallback():
    # Without wedges, the label centroid anchors the clock.
    items = [
        ("pie_label", box_at(400, 150), "Top"),
        ("pie_label", box_at(550, 300), "Right"),
        ("pie_label", box_at(250, 300), "Left"),
    ]
    ordered = order_elements(items)
    assert ordered[("pie_label", 0)][0] == "Top"
    assert ordered[("pie_label", 1)][0] == "Right"
    assert ordered[("pie_label", 2)][0] == "Left"


def test_detect_axis_swap():
    vertical = [("bar_v", (100, 300, 120, 500), ""),
                ("bar_v", (140, 200, 160, 500), ""),
                ("bar_v", (180, 400, 200, 500), "")]
    assert detect_axis_swap(vertical) is False
    horizontal = [("bar_h", (100, 100, 400, 120), ""),
                  ("bar_h", (100, 140, 250, 160), ""),
                  ("bar_h", (100, 180, 330, 200), "")]
    assert detect_axis_swap(horizontal) is True
    square = [("box_glyph_v", (100, 100, 150, 150), "")]
    assert detect_axis_swap(square) is False  # tied variances: no swap
    with pytest.warns(UserWarning):
        assert detect_axis_swap([("wedge", (0, 0, 10, 10), "")]) is False


def test_swap_classes_are_bar_like():
    assert set(SWAP_CLASSES) == {
        "bar_v", "bar_h", "stacked_segment_v", "stacked_segment_h",
        "box_glyph_v", "box_glyph_h"}


def test_horizontal_vertical_twins_order_identically(make_chart):
    """A chart and its axis-flipped twin expose identical element maps
    for every text that names data (categories, legend, titles)."""
    spec, _, _ = make_chart("grouped_bar_v", 17)
    for pair in (("grouped_bar_v", "grouped_bar_h"),
                 ("stacked_bar_v", "stacked_bar_h")):
        v_spec = dataclasses.replace(spec, chart_type=pair[0])
        h_spec = dataclasses.replace(spec, chart_type=pair[1])
        maps = []
        for s in (v_spec, h_spec):
            ann = annotate(layout(s), chart_id="twin")
            ordered = order_elements(ann, swap=detect_axis_swap(ann))
            maps.append({k: v[0] for k, v in ordered.items()})
        v_map, h_map = maps
        for etype in ("x_label", "legend_label", "chart_title",
                      "legend_title"):
            v_keys = sorted(k for k in v_map if k[0] == etype)
            h_keys = sorted(k for k in h_map if k[0] == etype)
            assert v_keys == h_keys, (pair, etype)
            if etype in ("x_label", "chart_title"):
                assert v_keys, etype  # these always exist
            for key in v_keys:
                assert v_map[key] == h_map[key], (pair, key)


# ---------------------------------------------------------------------------
# Text attachment


def test_attach_text_recovers_strings(make_chart):
    _, _, ann = make_chart("grouped_bar_v", 3)
    dets = [(a.element_class,
             (a.box[0] + 1.0, a.box[1] + 1.0, a.box[2] + 1.0,
              a.box[3] + 1.0), 0.9)
            for a in ann.elements]
    attached = attach_text(dets, ann)
    truth = [(a.element_class, a.text if a.has_text else "")
             for a in ann.elements]
    got = [(cls, text) for (cls, _, text) in attached]
    assert got == truth


def test_attach_text_greedy_and_threshold():
    from chartgen.annotate import Annotation, AnnotationSet

    truth = AnnotationSet(chart_id="t", canvas=(800, 600), elements=(
        Annotation("x_axis_label", (0.0, 0.0, 10.0, 10.0), (), "Label",
                   True, 0),))
    close = ("x_axis_label", (0.0, 1.0, 10.0, 11.0), 0.9)
    far = ("x_axis_label", (0.0, 4.0, 10.0, 14.0), 0.99)
    exactly_half = ("x_axis_label", (0.0, 0.0, 10.0, 5.0), 0.5)
    below_half = ("x_axis_label", (0.0, 0.0, 10.0, 4.9), 0.5)
    glyph = ("bar_v", (0.0, 0.0, 10.0, 10.0), 1.0)

    # The better-overlapping detection wins regardless of confidence
    # or input position; the loser keeps "".
    out = attach_text([far, close], truth)
    assert out[0][2] == "" and out[1][2] == "Label"

    # IoU exactly at the threshold still attaches; just below does not.
    assert attach_text([exactly_half], truth)[0][2] == "Label"
    assert attach_text([below_half], truth)[0][2] == ""
    assert ATTACH_MIN_IOU == 0.5

    # Plot-glyph detections never take text even at perfect overlap.
    assert attach_text([glyph], truth)[0][2] == ""


def test_attach_text_provider_hook():
    from chartgen.annotate import Annotation, AnnotationSet

    truth = AnnotationSet(chart_id="t", canvas=(800, 600), elements=(
        Annotation("chart_title", (0.0, 0.0, 100.0, 20.0), (), "Title",
                   True, 0),))
    det = [("chart_title", (0.0, 0.0, 100.0, 20.0), 1.0)]
    out = attach_text(det, truth, text_provider=str.upper)
    assert out[0][2] == "TITLE"


# ---------------------------------------------------------------------------
# Question encoding


def ordered_fixture():
    return order_elements(AXIS_ITEMS)


def test_encode_question_replaces_known_strings():
    tokens = default_token_map()
    ordered = ordered_fixture()
    q = "Is West larger than East for Alpha?"
    enc = encode_question(q, ordered, tokens)
    t_west = tokens.token_for(("x_label", 0))
    t_east = tokens.token_for(("x_label", 2))
    t_alpha = tokens.token_for(("legend_label", 0))
    assert enc == f"Is {t_west} larger than {t_east} for {t_alpha}?"
    # Unknown text passes through untouched, and encoding is
    # idempotent because tokens are rare words.
    assert encode_question(enc, ordered, tokens) == enc
    assert encode_question("No chart words here.", ordered, tokens) == \
        "No chart words here."


def test_encode_question_longest_first():
    tokens = default_token_map()
    items = [
        ("x_axis_label", box_at(100, 540), "North"),
        ("x_axis_label", box_at(300, 540), "North East"),
    ]
    ordered = order_elements(items)
    enc = encode_question("Compare North East with North.",
                          ordered, tokens)
    assert enc == (
        f"Compare {tokens.token_for(('x_label', 1))} with "
        f"{tokens.token_for(('x_label', 0))}.")


def test_encode_question_prefers_specific_key():
    tokens = default_token_map()
    items = [
        ("legend_title", box_at(650, 80), "Region"),
        ("x_axis_title", box_at(400, 580), "Region"),
    ]
    ordered = order_elements(items)
    enc = encode_question("Does Region appear?", ordered, tokens)
    assert tokens.token_for(("legend_title", 0)) in enc
    assert tokens.token_for(("x_axis_title", 0)) not in enc
    assert KEY_PREFERENCE[0] == "legend_title"


def test_encode_question_skips_uncapped_orders():
    tokens = default_token_map()
    ordered = {("x_label", 25): ("Overflow", (0, 0, 1, 1))}
    q = "Where is Overflow?"
    assert encode_question(q, ordered, tokens) == q


# ---------------------------------------------------------------------------
# Answer vectors


def test_encode_answer_slot_families():
    ordered = ordered_fixture()
    vec = encode_answer(["West"], ordered, "grouped_bar_v")
    assert vec[0] == 1 and sum(vec) == 1
    vec = encode_answer(["Beta"], ordered, "grouped_bar_v")
    assert vec[21] == 1 and sum(vec) == 1
    vec = encode_answer(["Yearly Output"], ordered, "grouped_bar_v")
    assert vec[35] == 1
    vec = encode_answer(["Region"], ordered, "grouped_bar_v")
    assert vec[36] == 1
    vec = encode_answer(["Tonnes"], ordered, "grouped_bar_v")
    assert vec[37] == 1
    vec = encode_answer(["Product"], ordered, "grouped_bar_v")
    assert vec[38] == 1
    for i, ct in enumerate(CHART_TYPES):
        vec = encode_answer([DISPLAY_NAMES[ct]], ordered, "pie")
        assert vec[CHART_TYPE_BASE + i] == 1 and sum(vec) == 1
    for i, word in enumerate(COMMON_WORDS):
        vec = encode_answer([word], ordered, "line")
        assert vec[COMMON_BASE + i] == 1
    for n in (1, 8, 15):
        vec = encode_answer([str(n)], ordered, "scatter")
        assert vec[NUMERAL_BASE + n - 1] == 1
    # Multi-answer sets produce multi-hot vectors.
    vec = encode_answer(["West", "East"], ordered, "grouped_bar_v")
    assert vec[0] == vec[2] == 1 and sum(vec) == 2


def test_encode_answer_duplicate_text_prefers_legend_title():
    items = [
        ("legend_title", box_at(650, 80), "Output"),
        ("y_axis_title", box_at(15, 300, 12, 80), "Output"),
    ]
    ordered = order_elements(items)
    vec = encode_answer(["Output"], ordered, "grouped_bar_v")
    assert vec[38] == 1 and vec[37] == 0


def test_encode_answer_errors():
    ordered = ordered_fixture()
    for bad in ("0", "16", "99", "Unseen Words", "-3"):
        with pytest.raises(EncodeError):
            encode_answer([bad], ordered, "grouped_bar_v")
    with pytest.raises(EncodeError):
        encode_answer(["West"], ordered, "violin")


def test_decode_answer_families_and_ties():
    ordered = ordered_fixture()
    vec = [0.0] * VECTOR_SIZE
    vec[2] = 0.9
    assert decode_answer(vec, ordered) == "East"
    vec[1] = 0.95
    assert decode_answer(vec, ordered) == "Mid"
    # A tie breaks toward the lowest slot index.
    tie = [0.0] * VECTOR_SIZE
    tie[49] = tie[50] = 1.0
    assert decode_answer(tie, ordered) == "Yes"
    # Set element slot without a matching element decodes to "".
    empty = [0.0] * VECTOR_SIZE
    empty[10] = 1.0
    assert decode_answer(empty, ordered) == ""
    missing_legend = [0.0] * VECTOR_SIZE
    missing_legend[34] = 1.0
    assert decode_answer(missing_legend, ordered) == ""
    # Chart-type, common-word and numeral slots decode to fixed text.
    for i, ct in enumerate(CHART_TYPES):
        one = [0.0] * VECTOR_SIZE
        one[CHART_TYPE_BASE + i] = 1.0
        assert decode_answer(one, ordered) == DISPLAY_NAMES[ct]
    nine = [0.0] * VECTOR_SIZE
    nine[NUMERAL_BASE + 8] = 1.0
    assert decode_answer(nine, ordered) == "9"


def test_decode_answer_pie_slots():
    items = [
        ("wedge", (300, 200, 500, 400), ""),
        ("pie_label", box_at(400, 150), "Top"),
        ("pie_label", box_at(550, 300), "Right"),
    ]
    ordered = order_elements(items)
    vec = [0.0] * VECTOR_SIZE
    vec[1] = 1.0
    assert decode_answer(vec, ordered) == "Right"


def test_decode_answer_errors():
    ordered = ordered_fixture()
    with pytest.raises(DecodeError):
        decode_answer([0.0] * 10, ordered)
    bad = [0.0] * VECTOR_SIZE
    bad[3] = float("nan")
    with pytest.raises(DecodeError):
        decode_answer(bad, ordered)
    reserved = [0.0] * VECTOR_SIZE
    reserved[RESERVED_BASE] = 1.0
    with pytest.raises(DecodeError):
        decode_answer(reserved, ordered)


@pytest.mark.parametrize("chart_type", CHART_TYPES)
def test_round_trip_on_rendered_charts(chart_type, make_chart):
    """encode -> decode returns the original string for every answer
    the chart can express."""
    _, _, ann = make_chart(chart_type, 17)
    swap = detect_axis_swap(ann) if any(
        a.element_class in SWAP_CLASSES for a in ann.elements) else False
    ordered = order_elements(ann, swap=swap)
    candidates = {text for (etype, _), (text, _) in ordered.items()
                  if etype in ("x_label", "pie_label", "legend_label",
                               "chart_title", "x_axis_title",
                               "y_axis_title", "legend_title") and text}
    candidates |= {DISPLAY_NAMES[chart_type], "Yes", "None", "7"}
    for answer in candidates:
        vec = encode_answer([answer], ordered, chart_type)
        assert decode_answer(vec, ordered) == answer
