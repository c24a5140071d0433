"""Command-line front end: build, validate and evaluate corpora.

Exit codes: 0 on success, 1 when the requested operation fails or
finds problems (a failed build, an invalid corpus, unreadable
predictions), 2 for bad usage or configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import (build_corpus, config_from_dict, evaluate_detection,
                     evaluate_end_to_end, evaluate_qa, load_config,
                     load_predictions, validate_corpus)
from .errors import ChartGenError, ConfigError
from .evaluate import format_detection_report, format_qa_report


def _add_build(sub) -> None:
    p = sub.add_parser("build", help="build a corpus from a config file")
    p.add_argument("--config", required=True,
                   help="JSON build configuration")
    p.add_argument("--seed", type=int, default=None,
                   help="override the configured master seed")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel chart builders (default 1)")
    p.add_argument("--overwrite", action="store_true",
                   help="replace a non-empty output directory")
    p.add_argument("--out", default=None,
                   help="override the configured output directory")


def _add_validate(sub) -> None:
    p = sub.add_parser("validate", help="re-check a corpus on disk")
    p.add_argument("--corpus", required=True, help="corpus directory")


def _add_evaluate(sub) -> None:
    p = sub.add_parser("evaluate", help="score predictions against a corpus")
    p.add_argument("--corpus", required=True, help="corpus directory")
    p.add_argument("--predictions", required=True,
                   help="JSONL prediction file")
    p.add_argument("--mode", required=True,
                   choices=("detection", "qa", "end_to_end"))
    p.add_argument("--ocr-rate", type=float, default=None,
                   help="per-character text corruption rate (end_to_end "
                        "only; default: the corpus config's "
                        "ocr_noise_rate)")
    p.add_argument("--ocr-seed", type=int, default=0,
                   help="seed for the text corruption stream")
    p.add_argument("--out", default=None,
                   help="also write the report as JSON to this file")


def _run_build(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        raw = dict(config.raw)
        raw["master_seed"] = args.seed
        config = config_from_dict(raw, Path(args.config).parent)
    manifest = build_corpus(config, workers=args.workers,
                            overwrite=args.overwrite,
                            output_dir=args.out)
    for split, section in manifest["splits"].items():
        print(f"{split}: {section['charts']} charts, "
              f"{section['questions']} questions "
              f"({section['skipped_questions']} skipped)")
    return 0


def _run_validate(args) -> int:
    problems = validate_corpus(args.corpus)
    for problem in problems:
        print(problem)
    if problems:
        print(f"{len(problems)} problem(s) found")
        return 1
    print("corpus valid")
    return 0


def _configured_ocr_rate(corpus_dir) -> float:
    """The corpus config's ocr_noise_rate, 0.0 when unavailable."""
    try:
        manifest = json.loads((Path(corpus_dir) / "manifest.json")
                              .read_text(encoding="utf-8"))
        return float(manifest["config"].get("ocr_noise_rate", 0.0))
    except (OSError, ValueError, KeyError, TypeError):
        return 0.0


def _run_evaluate(args) -> int:
    detections, answers = load_predictions(args.predictions)
    if args.mode == "detection":
        report = evaluate_detection(args.corpus, detections)
        print(format_detection_report(report))
    elif args.mode == "qa":
        report = evaluate_qa(args.corpus, answers)
        print(format_qa_report(report))
    else:
        ocr_rate = args.ocr_rate
        if ocr_rate is None:
            ocr_rate = _configured_ocr_rate(args.corpus)
        report = evaluate_end_to_end(args.corpus, detections,
                                     ocr_rate=ocr_rate,
                                     ocr_seed=args.ocr_seed)
        print(format_qa_report(report))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chartgen",
        description="Deterministic synthetic chart corpora with "
                    "question-answer pairs.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_build(sub)
    _add_validate(sub)
    _add_evaluate(sub)
    args = parser.parse_args(argv)
    try:
        if args.command == "build":
            return _run_build(args)
        if args.command == "validate":
            return _run_validate(args)
        return _run_evaluate(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ChartGenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
