"""Scoring for chart-parsing and question-answering predictions.

Detection predictions are matched to ground-truth elements greedily:
highest-confidence prediction first, each taking the unassigned truth
element of its own class with the maximal IoU, provided that IoU
exceeds the threshold (strictly).  Masked classes (wedges, line
segments) are compared by polygon-mask IoU when both sides carry a
mask, and by bounding-box IoU otherwise.  Precision and recall are
computed per chart per class and macro-averaged over charts.

QA predictions are exact-string matches against the stored answer set;
producing any one member of a multi-answer set counts as correct.

:func:`simulate_ocr` perturbs strings with a per-character error rate
(substitute / delete / insert, uniformly), for oracle-versus-OCR text
attachment studies.
"""

from __future__ import annotations

import string
import warnings
from dataclasses import dataclass, field

import numpy as np

from .annotate import AnnotationSet, ELEMENT_CLASSES, MASKED_CLASSES
from .errors import EvaluationError
from .geometry import box_iou, polygon_iou

IOU_THRESHOLD = 0.5

_OCR_POOL = string.ascii_letters + string.digits


@dataclass(frozen=True)
class Prediction:
    """One predicted chart element."""

    chart_id: str
    element_class: str
    box: tuple  # (x0, y0, x1, y1)
    confidence: float
    mask: tuple = ()  # polygon vertices, optional
    text: str | None = None

    def __post_init__(self):
        if self.element_class not in ELEMENT_CLASSES:
            raise EvaluationError(
                f"unknown element class {self.element_class!r}")
        if not np.isfinite(self.confidence):
            raise EvaluationError("prediction confidence must be finite")
        x0, y0, x1, y1 = self.box
        if x1 < x0 or y1 < y0:
            raise EvaluationError(f"degenerate prediction box {self.box}")

    def clipped(self, width: float, height: float) -> "Prediction":
        """Copy clipped to the canvas, warning when clipping occurred."""
        x0, y0, x1, y1 = self.box
        cx0, cy0 = max(0.0, x0), max(0.0, y0)
        cx1, cy1 = min(float(width), x1), min(float(height), y1)
        if (cx0, cy0, cx1, cy1) == (x0, y0, x1, y1):
            return self
        warnings.warn(
            f"prediction box {self.box} leaves the {width}x{height} "
            "canvas; clipped", stacklevel=2)
        return Prediction(self.chart_id, self.element_class,
                          (cx0, cy0, max(cx0, cx1), max(cy0, cy1)),
                          self.confidence, self.mask, self.text)

    def to_dict(self) -> dict:
        data = {
            "chart_id": self.chart_id,
            "element_class": self.element_class,
            "box": list(self.box),
            "confidence": self.confidence,
        }
        if self.mask:
            data["mask"] = [list(p) for p in self.mask]
        if self.text is not None:
            data["text"] = self.text
        return data

    @staticmethod
    def from_dict(data: dict) -> "Prediction":
        mask = tuple(tuple(float(v) for v in p)
                     for p in data.get("mask", ()))
        return Prediction(
            chart_id=data["chart_id"],
            element_class=data["element_class"],
            box=tuple(float(v) for v in data["box"]),
            confidence=float(data["confidence"]),
            mask=mask,
            text=data.get("text"),
        )


@dataclass
class MatchResult:
    """Greedy assignment of predictions to ground-truth elements."""

    pairs: list = field(default_factory=list)  # (pred_idx, truth_idx, iou)
    n_pred: int = 0
    n_truth: int = 0

    @property
    def matched_preds(self) -> set:
        return {p for p, _, _ in self.pairs}

    @property
    def matched_truths(self) -> set:
        return {t for _, t, _ in self.pairs}


def _pair_iou(pred: Prediction, truth) -> float:
    if truth.element_class in MASKED_CLASSES and pred.mask and truth.mask:
        return polygon_iou(list(pred.mask), list(truth.mask))
    return box_iou(pred.box, truth.box)


def annotations_as_predictions(truth: AnnotationSet,
                               confidence: float = 1.0) -> list:
    """Ground-truth elements re-expressed as predictions.

    Useful as a perfect-detector baseline: feeding the result back
    into the scorer must yield precision and recall 1.0.
    """
    return [Prediction(chart_id=truth.chart_id,
                       element_class=e.element_class, box=e.box,
                       confidence=confidence, mask=e.mask,
                       text=e.text if e.has_text else None)
            for e in truth.elements]


def match_detections(preds, truth: AnnotationSet,
                     iou_threshold: float = IOU_THRESHOLD) -> MatchResult:
    """Assign predictions to ground-truth elements of the same class.

    Predictions are visited in descending confidence (ties keep input
    order); each claims its maximal-IoU unassigned truth element when
    that IoU is strictly above the threshold.  No truth element is
    claimed twice and classes never cross.
    """
    preds = list(preds)
    result = MatchResult(n_pred=len(preds), n_truth=len(truth.elements))
    order = sorted(range(len(preds)),
                   key=lambda i: (-preds[i].confidence, i))
    taken = set()
    for pi in order:
        pred = preds[pi]
        best_iou, best_ti = 0.0, -1
        for ti, ann in enumerate(truth.elements):
            if ti in taken or ann.element_class != pred.element_class:
                continue
            iou = _pair_iou(pred, ann)
            if iou > best_iou:
                best_iou, best_ti = iou, ti
        if best_ti >= 0 and best_iou > iou_threshold:
            taken.add(best_ti)
            result.pairs.append((pi, best_ti, best_iou))
    result.pairs.sort()
    return result


def score_chart(preds, truth: AnnotationSet,
                iou_threshold: float = IOU_THRESHOLD) -> dict:
    """Per-class (n_predicted, n_truth, n_matched) for one chart."""
    match = match_detections(preds, truth, iou_threshold)
    counts = {}
    for pred in preds:
        cls = pred.element_class
        counts.setdefault(cls, [0, 0, 0])[0] += 1
    for ann in truth.elements:
        counts.setdefault(ann.element_class, [0, 0, 0])[1] += 1
    preds = list(preds)
    for pi, _, _ in match.pairs:
        counts[preds[pi].element_class][2] += 1
    return {cls: tuple(v) for cls, v in counts.items()}


def precision_recall(chart_scores) -> dict:
    """Macro-averaged per-class precision and recall over charts.

    Per chart and class, precision is matched/predicted and recall is
    matched/truth.  A chart with no predictions of a class it does
    contain contributes recall 0 but no precision sample (precision is
    undefined there); symmetrically, a chart with predictions of an
    absent class contributes precision 0 but no recall sample.  Element
    classes that appear nowhere in the corpus are listed under
    ``"omitted"``.
    """
    per_class_p = {}
    per_class_r = {}
    seen = set()
    for scores in chart_scores:
        for cls, (n_pred, n_truth, n_match) in scores.items():
            seen.add(cls)
            if n_pred > 0:
                per_class_p.setdefault(cls, []).append(n_match / n_pred)
            if n_truth > 0:
                per_class_r.setdefault(cls, []).append(n_match / n_truth)
    report = {"classes": {}, "omitted": sorted(
        set(ELEMENT_CLASSES) - seen)}
    for cls in sorted(seen):
        p_samples = per_class_p.get(cls, [])
        r_samples = per_class_r.get(cls, [])
        report["classes"][cls] = {
            "precision": (sum(p_samples) / len(p_samples)
                          if p_samples else None),
            "recall": (sum(r_samples) / len(r_samples)
                       if r_samples else None),
            "charts_scored_precision": len(p_samples),
            "charts_scored_recall": len(r_samples),
        }
    return report


def qa_accuracy(predicted: dict, truth_records) -> dict:
    """Exact-match QA accuracy, overall and per question/answer type.

    ``predicted`` maps question ids to answer strings; a prediction is
    correct when its string is a member of the stored answer set.
    Questions without a prediction count as incorrect.  Predictions
    for unknown question ids raise :class:`EvaluationError`.
    """
    truth_records = list(truth_records)
    known = {rec["question_id"] for rec in truth_records}
    unknown = set(predicted) - known
    if unknown:
        raise EvaluationError(
            f"predictions reference unknown question ids: "
            f"{sorted(unknown)[:5]}")
    cells = {}
    correct_total = 0
    for rec in truth_records:
        qid = rec["question_id"]
        cell = cells.setdefault(
            (rec["question_type"], rec["answer_type"]),
            {"correct": 0, "total": 0})
        cell["total"] += 1
        answer = predicted.get(qid)
        if answer is not None and answer in set(rec["answers"]):
            cell["correct"] += 1
            correct_total += 1
    out_cells = {}
    for (qtype, atype), cell in sorted(cells.items()):
        out_cells[f"{qtype}/{atype}"] = {
            "correct": cell["correct"],
            "total": cell["total"],
            "accuracy": cell["correct"] / cell["total"],
        }
    total = len(truth_records)
    return {
        "overall": {
            "correct": correct_total,
            "total": total,
            "accuracy": correct_total / total if total else None,
        },
        "cells": out_cells,
    }


def simulate_ocr(strings, rng, char_error_rate: float) -> list:
    """Corrupt strings with independent per-character errors.

    Each character is hit with probability ``char_error_rate``; a hit
    is a substitution, deletion, or insertion (after the character),
    chosen uniformly.  Substitutions never reproduce the original
    character.  Fully deterministic for a given generator state.
    """
    if not 0.0 <= char_error_rate <= 1.0:
        raise EvaluationError(
            f"char error rate {char_error_rate} outside [0, 1]")
    out = []
    for text in strings:
        chars = []
        for ch in text:
            if rng.random() >= char_error_rate:
                chars.append(ch)
                continue
            op = int(rng.integers(3))
            if op == 0:  # substitute
                pool = _OCR_POOL.replace(ch, "")
                chars.append(pool[int(rng.integers(len(pool)))])
            elif op == 1:  # delete
                pass
            else:  # insert after
                chars.append(ch)
                chars.append(_OCR_POOL[int(rng.integers(len(_OCR_POOL)))])
        out.append("".join(chars))
    return out


def format_detection_report(report: dict) -> str:
    """Plain-text table of per-class precision and recall."""
    lines = [f"{'class':<20} {'precision':>10} {'recall':>10} "
             f"{'charts':>7}"]
    for cls, cell in report["classes"].items():
        p = cell["precision"]
        r = cell["recall"]
        charts = max(cell["charts_scored_precision"],
                     cell["charts_scored_recall"])
        lines.append(
            f"{cls:<20} "
            f"{p if p is None else format(p, '.4f'):>10} "
            f"{r if r is None else format(r, '.4f'):>10} "
            f"{charts:>7}")
    if report["omitted"]:
        lines.append("absent from corpus: " + ", ".join(report["omitted"]))
    return "\n".join(lines)


def format_qa_report(report: dict) -> str:
    """Plain-text accuracy table by question and answer type."""
    lines = [f"{'cell':<40} {'correct':>8} {'total':>8} {'accuracy':>9}"]
    for name, cell in report["cells"].items():
        lines.append(f"{name:<40} {cell['correct']:>8} {cell['total']:>8} "
                     f"{cell['accuracy']:>9.4f}")
    overall = report["overall"]
    acc = overall["accuracy"]
    lines.append(f"{'overall':<40} {overall['correct']:>8} "
                 f"{overall['total']:>8} "
                 f"{acc if acc is None else format(acc, '.4f'):>9}")
    return "\n".join(lines)
