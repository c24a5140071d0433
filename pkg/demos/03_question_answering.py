"""
Questions, answers, and the fixed answer vocabulary
===================================================

Questions come from a bundled template bank: each template carries
several paraphrases over the same slots, and the answer set is
computed from the chart specification, never from pixels.  Answers
are chart strings, chart-type names, or a small common vocabulary -
which is what lets every answer live in a fixed 75-slot vector
indexed by the chart's own elements.
"""

import numpy as np

from chartgen import (annotate, decode_answer, default_token_map,
                      detect_axis_swap, encode_answer, encode_question,
                      generate_all, layout, load_table, make_chart_spec,
                      order_elements, solve)
from chartgen.corpus import bundled_table_dir
from chartgen.encoding import SWAP_CLASSES
from chartgen.tables import impute_table

# ---------------------------------------------------------------------
# Build one grouped bar chart and generate its questions.

table = load_table(
    (bundled_table_dir("train") / "city_climate.csv").read_bytes(),
    name="city_climate")
rng = np.random.default_rng(11)
spec = make_chart_spec(impute_table(table, rng), "grouped_bar_v", rng)
scene = layout(spec)
ann = annotate(scene, chart_id="demo")

pairs = generate_all(spec, ann, rng, quota=6)
for pair in pairs:
    answers = " | ".join(sorted(pair.answers))
    print(f"[{pair.question_type:<10}] {pair.question}")
    print(f"{'':14}-> {answers}")

# ---------------------------------------------------------------------
# Every answer set is re-derivable from the semantic form alone; the
# stored strings are never the source of truth.

pair = pairs[0]
rederived = solve(pair.semantic_form, spec)
print(f"\nre-derived == stored: {rederived == pair.answers}")

# ---------------------------------------------------------------------
# Question encoding replaces chart strings with reserved tokens keyed
# by element role and position, so a model never needs the chart's
# open vocabulary.  Answer encoding marks slots in a 75-entry vector;
# decoding maps set bits back through the chart's ordered elements.

glyphs = any(e.element_class in SWAP_CLASSES for e in ann.elements)
swap = detect_axis_swap(ann) if glyphs else False
ordered = order_elements(ann, swap)
tokens = default_token_map()

encoded = encode_question(pair.question, ordered, tokens)
print(f"\noriginal: {pair.question}")
print(f"encoded:  {encoded}")

vector = encode_answer(pair.answers, ordered, spec.chart_type)
slots = [i for i, bit in enumerate(vector) if bit]
print(f"answer slots set: {slots}")
print(f"decoded answer:   {decode_answer(vector, ordered)!r}")
