"""
Building a corpus and scoring predictions against it
====================================================

A corpus build is driven by one JSON config: chart counts per split,
chart-type weights, a question quota, and table directories.  The
build is deterministic - same config, same bytes - and writes a
manifest with SHA-256 digests of every artifact.  The evaluation
harness then scores detection boxes, QA answers, or the full
detect -> read text -> answer pipeline.
"""

import json
import shutil
import tempfile
from pathlib import Path

from chartgen import build_corpus, config_from_dict, validate_corpus
from chartgen.corpus import (bundled_table_dir, corpus_charts,
                             corpus_qa_records, evaluate_detection,
                             evaluate_end_to_end, load_annotations)
from chartgen.evaluate import annotations_as_predictions, format_qa_report
from chartgen.synth import CHART_TYPES

work = Path(tempfile.mkdtemp(prefix="chartgen_demo_"))

# ---------------------------------------------------------------------
# Configure and build: 30 charts over three splits, eight questions
# per chart.  The novel_test split draws from a disjoint table pool.

config = config_from_dict({
    "schema_version": "1",
    "master_seed": 20240601,
    "chart_type_weights": {ct: 1.0 for ct in CHART_TYPES},
    "charts": {"train": 14, "test": 8, "novel_test": 8},
    "questions_per_chart": 8,
    "table_dirs": {
        "train": [str(bundled_table_dir("train"))],
        "test": [str(bundled_table_dir("train"))],
        "novel_test": [str(bundled_table_dir("novel"))],
    },
    "output_dir": str(work / "corpus"),
})
manifest = build_corpus(config)
for split, section in manifest["splits"].items():
    print(f"{split:<11} {section['charts']:>3} charts  "
          f"{section['questions']:>4} questions")

# ---------------------------------------------------------------------
# Validation re-checks everything from disk: digests, schemas,
# annotation invariants, and a full re-derivation of every answer.

problems = validate_corpus(work / "corpus")
print(f"\nvalidation problems: {len(problems)}")

# ---------------------------------------------------------------------
# A perfect detector: feed the ground truth back as predictions.
# Precision and recall are 1.0 for every element class, and the
# end-to-end pipeline answers every question correctly.

detections = {}
for split, chart_id in corpus_charts(work / "corpus"):
    truth = load_annotations(work / "corpus", split, chart_id)
    detections[chart_id] = annotations_as_predictions(truth)

report = evaluate_detection(work / "corpus", detections)
worst = min(min(c["precision"], c["recall"])
            for c in report["classes"].values())
print(f"perfect detector, worst class P/R: {worst:.4f}")

clean = evaluate_end_to_end(work / "corpus", detections)
print(f"end-to-end accuracy, oracle text:  "
      f"{clean['overall']['accuracy']:.4f}")

# ---------------------------------------------------------------------
# Now degrade the inputs: drop every fourth detection, and corrupt
# attached text at a 5% character error rate.  Recall drops by the
# deletion fraction; only chart-vocabulary answers suffer from OCR
# noise, since the common vocabulary never depends on reading text.

degraded = {cid: [p for k, p in enumerate(preds) if k % 4 != 0]
            for cid, preds in detections.items()}
report = evaluate_detection(work / "corpus", degraded)
recalls = [c["recall"] for c in report["classes"].values()
           if c["recall"] is not None]
print(f"\ndropping 1/4 of detections, mean recall: "
      f"{sum(recalls) / len(recalls):.3f}")

noisy = evaluate_end_to_end(work / "corpus", detections, ocr_rate=0.05)
print("end-to-end with OCR noise:")
print(format_qa_report(noisy))

# The corpus directory follows one layout: per-split chart artifacts
# (SVG, annotations, spec), qa.jsonl / skipped.jsonl, and the
# manifest at the root.

n_records = len(corpus_qa_records(work / "corpus"))
digest_count = len(manifest["digests"])
print(f"\n{n_records} QA records, {digest_count} digested files")

shutil.rmtree(work)
