"""Question generation from templates.

A bundled template bank (``data/templates.json``) holds structural
questions (chart type, element counts, presence, title retrieval) and
relational ones (argmax/argmin, pairwise comparison, counting against
a reference, median comparison, trend sign, share comparison).  Each
template carries 3-10 paraphrases over one slot set; instantiation
picks a paraphrase uniformly, fills slots with verbatim chart strings,
and computes the answer set with :func:`chartgen.oracle.solve`.

Questions never ask for numeric data values: answers are always chart
strings, chart-type names, or the small common vocabulary (Yes / No /
None / negative / positive / numerals 1-15), which is what makes the
fixed answer encoding possible.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .annotate import AnnotationSet
from .errors import QAError
from .oracle import (OPS, PRESENT_TARGETS, COUNT_TARGETS, SemanticForm,
                     TITLE_TARGETS, category_key_type, solve)
from .synth import CHART_TYPES, ChartSpec

QUESTION_TYPES = ("structural", "relational")
ANSWER_TYPES = ("chart_vocabulary", "common_vocabulary", "chart_type")

# Answers of these operations are strings rendered inside the chart.
_CHART_VOCAB_OPS = {"TITLE_TEXT", "ARGMAX", "ARGMIN", "LABELS_ABOVE",
                    "LABELS_BELOW"}

_SLOT_PATTERN = re.compile(r"\{([a-z_]+)\}")

DEFAULT_QUOTA = 8
_EXTRA_ROUNDS = 2  # re-attempts of slotted templates to fill the quota


@dataclass(frozen=True)
class Template:
    id: str
    question_type: str
    op: str
    target: str
    slots: tuple
    applicable_chart_types: frozenset
    paraphrases: tuple


@dataclass(frozen=True)
class QAPair:
    chart_id: str
    template_id: str
    question: str
    question_type: str
    answer_type: str
    answers: frozenset
    semantic_form: SemanticForm

    def to_dict(self) -> dict:
        return {
            "chart_id": self.chart_id,
            "template_id": self.template_id,
            "question": self.question,
            "question_type": self.question_type,
            "answer_type": self.answer_type,
            "answers": sorted(self.answers),
            "semantic_form": self.semantic_form.to_dict(),
        }

    @staticmethod
    def from_dict(data: dict) -> "QAPair":
        return QAPair(
            chart_id=data["chart_id"],
            template_id=data["template_id"],
            question=data["question"],
            question_type=data["question_type"],
            answer_type=data["answer_type"],
            answers=frozenset(data["answers"]),
            semantic_form=SemanticForm.from_dict(data["semantic_form"]),
        )


def _validate_template(raw: dict) -> Template:
    tid = raw.get("id", "<missing id>")
    paraphrases = tuple(raw["paraphrases"])
    if not 3 <= len(paraphrases) <= 10:
        raise QAError(f"template {tid}: {len(paraphrases)} paraphrases "
                      "(need 3-10)")
    slots = tuple(raw["slots"])
    slot_set = set(slots)
    for p in paraphrases:
        if set(_SLOT_PATTERN.findall(p)) != slot_set:
            raise QAError(f"template {tid}: paraphrase {p!r} does not "
                          f"use exactly the slots {sorted(slot_set)}")
    if raw["question_type"] not in QUESTION_TYPES:
        raise QAError(f"template {tid}: bad question_type "
                      f"{raw['question_type']!r}")
    op = raw["op"]
    if op not in OPS:
        raise QAError(f"template {tid}: unknown op {op!r}")
    target = raw["target"]
    if op == "COUNT" and target not in COUNT_TARGETS:
        raise QAError(f"template {tid}: bad COUNT target {target!r}")
    if op == "PRESENT" and target not in PRESENT_TARGETS:
        raise QAError(f"template {tid}: bad PRESENT target {target!r}")
    if op == "TITLE_TEXT" and target not in TITLE_TARGETS:
        raise QAError(f"template {tid}: bad TITLE_TEXT target {target!r}")
    chart_types = frozenset(raw["applicable_chart_types"])
    bad = chart_types - set(CHART_TYPES)
    if bad:
        raise QAError(f"template {tid}: unknown chart types {sorted(bad)}")
    return Template(
        id=tid, question_type=raw["question_type"], op=op, target=target,
        slots=slots, applicable_chart_types=chart_types,
        paraphrases=paraphrases)


@lru_cache(maxsize=1)
def load_templates() -> tuple:
    """The bundled template bank, validated."""
    raw = json.loads(resources.files("chartgen.data")
                     .joinpath("templates.json").read_text("utf-8"))
    templates = tuple(_validate_template(t) for t in raw["templates"])
    ids = [t.id for t in templates]
    if len(set(ids)) != len(ids):
        raise QAError("template bank contains duplicate ids")
    return templates


def applicable_templates(chart_type: str) -> list:
    """Templates whose applicability set contains ``chart_type``."""
    if chart_type not in CHART_TYPES:
        raise QAError(f"unknown chart type {chart_type!r}")
    return [t for t in load_templates()
            if chart_type in t.applicable_chart_types]


def answer_type_for(op: str) -> str:
    if op == "CHART_TYPE":
        return "chart_type"
    if op in _CHART_VOCAB_OPS:
        return "chart_vocabulary"
    return "common_vocabulary"


def _skip(skip_log, template_id: str, reason: str) -> None:
    if skip_log is not None:
        skip_log.append({"template_id": template_id, "reason": reason})


def _slot_domains(template: Template, spec: ChartSpec):
    """Concrete fill domains per slot, or a skip reason.

    Slot fills must be strings rendered in the chart: categories are
    always drawn as axis/pie labels, but series names appear only in a
    shown legend.
    """
    n_cat = len(spec.category_labels)
    domains = {}
    for slot in template.slots:
        if slot == "series":
            if not spec.show_legend or len(spec.series) < 2:
                return None, "needs a multi-series legend"
            domains[slot] = ("series", len(spec.series))
        elif slot in ("a", "b", "ref"):
            domains[slot] = ("category", n_cat)
        else:
            raise QAError(
                f"template {template.id}: unknown slot {slot!r}")
    if "a" in domains and "b" in domains and n_cat < 2:
        return None, "needs two categories"
    return domains, ""


def _needs_single_series(template: Template) -> bool:
    """Category-valued relational ops without a series slot read 'the'
    series, which is only well-defined when exactly one exists."""
    return (template.op in ("ARGMAX", "ARGMIN", "COMPARE", "COUNT_ABOVE",
                            "COUNT_BELOW", "LABELS_ABOVE", "LABELS_BELOW")
            and template.target == ""
            and "series" not in template.slots
            and not template.applicable_chart_types
            <= {"pie", "donut", "box_h", "box_v"})


def instantiate(template: Template, spec: ChartSpec,
                annotations: AnnotationSet, rng,
                skip_log: list | None = None) -> QAPair | None:
    """One QA pair from a template, or None when the question has no
    usable answer on this chart (reason appended to ``skip_log``).

    Draws from ``rng`` in a fixed order — paraphrase index first, then
    slot fills in the template's declared slot order — so generation
    is reproducible stream-for-stream.
    """
    if spec.chart_type not in template.applicable_chart_types:
        raise QAError(f"template {template.id} is not applicable to "
                      f"{spec.chart_type}")
    question = template.paraphrases[int(rng.integers(
        len(template.paraphrases)))]

    if _needs_single_series(template) and len(spec.series) != 1:
        _skip(skip_log, template.id, "needs a single series")
        return None
    if template.target == "series_at" and (
            not spec.show_legend or len(spec.series) < 2):
        # Answers are series names, which must be readable in a legend.
        _skip(skip_log, template.id, "needs a multi-series legend")
        return None

    domains, reason = _slot_domains(template, spec)
    if domains is None:
        _skip(skip_log, template.id, reason)
        return None

    cat_type = category_key_type(spec.chart_type)
    fills = {}
    keys = {}
    drawn_categories = []
    if "a" in domains and "b" in domains:
        i, j = (int(v) for v in rng.choice(
            len(spec.category_labels), size=2, replace=False))
        fills["a"], keys["a"] = spec.category_labels[i], (cat_type, i)
        fills["b"], keys["b"] = spec.category_labels[j], (cat_type, j)
        drawn_categories = ["a", "b"]
    for slot in template.slots:
        if slot in drawn_categories:
            continue
        kind, size = domains[slot]
        idx = int(rng.integers(size))
        if kind == "series":
            fills[slot] = spec.series[idx][0]
            keys[slot] = ("legend_label", idx)
        else:
            fills[slot] = spec.category_labels[idx]
            keys[slot] = (cat_type, idx)

    ordered_keys = [keys[s] for s in ("a", "b", "ref") if s in keys]
    if "series" in keys:
        ordered_keys.append(keys["series"])
    form = SemanticForm(op=template.op, target=template.target,
                        keys=tuple(ordered_keys))

    answers = solve(form, spec)
    if not answers:
        _skip(skip_log, template.id, "no usable answer")
        return None

    for name, value in fills.items():
        question = question.replace("{" + name + "}", value)
    leftover = set(_SLOT_PATTERN.findall(question)) & set(template.slots)
    if leftover:
        raise QAError(f"template {template.id}: unfilled slots "
                      f"{sorted(leftover)} in {question!r}")

    answer_type = answer_type_for(template.op)
    if answer_type == "chart_vocabulary":
        texts = {a.text for a in annotations.elements if a.has_text}
        missing = answers - texts
        if missing:
            raise QAError(
                f"template {template.id}: answers {sorted(missing)} are "
                "not rendered in the chart")
    return QAPair(
        chart_id=annotations.chart_id, template_id=template.id,
        question=question, question_type=template.question_type,
        answer_type=answer_type, answers=answers, semantic_form=form)


def generate_all(spec: ChartSpec, annotations: AnnotationSet, rng,
                 quota: int = DEFAULT_QUOTA,
                 skip_log: list | None = None) -> list:
    """Up to ``quota`` distinct QA pairs for one chart.

    Applicable templates are tried once in a shuffled order; if the
    quota is not met, templates with slots are retried (fresh slot
    draws can yield new questions).  Duplicate question/answer
    combinations are dropped and logged.
    """
    if quota <= 0:
        return []
    templates = applicable_templates(spec.chart_type)
    order = [templates[int(i)] for i in rng.permutation(len(templates))]
    pairs = []
    seen = set()

    def attempt(template):
        pair = instantiate(template, spec, annotations, rng, skip_log)
        if pair is None:
            return
        key = (pair.template_id, pair.question,
               tuple(sorted(pair.answers)))
        if key in seen:
            _skip(skip_log, template.id, "duplicate")
            return
        seen.add(key)
        pairs.append(pair)

    for template in order:
        if len(pairs) >= quota:
            return pairs
        attempt(template)
    slotted = [t for t in order if t.slots]
    for _ in range(_EXTRA_ROUNDS):
        for template in slotted:
            if len(pairs) >= quota:
                return pairs
            attempt(template)
    return pairs
