"""Deterministic synthetic chart corpora with dense annotations,
question-answer pairs, and a detection/QA evaluation harness."""

__version__ = "0.1.0"

from .annotate import Annotation, AnnotationSet, annotate
from .corpus import (CorpusConfig, apportion_counts, build_chart,
                     build_corpus, bundled_table_dir, config_from_dict,
                     evaluate_detection,
                     evaluate_end_to_end, evaluate_qa, load_config,
                     load_predictions, validate_corpus)
from .encoding import (ReservedTokenMap, attach_text, decode_answer,
                       default_token_map, detect_axis_swap, encode_answer,
                       encode_question, order_elements)
from .errors import (ChartGenError, ConfigError, CorpusError, DecodeError,
                     EncodeError, EvaluationError, QAError, RenderError,
                     SynthesisError, TableError)
from .evaluate import (MatchResult, Prediction,
                       annotations_as_predictions, match_detections,
                       precision_recall, qa_accuracy, score_chart,
                       simulate_ocr)
from .layout import layout
from .oracle import SemanticForm, solve
from .qa import QAPair, Template, applicable_templates, generate_all
from .qa import instantiate as instantiate_template
from .qa import load_templates
from .svgout import render_svg
from .synth import (CHART_TYPES, DISPLAY_NAMES, BoxStats, ChartSpec,
                    StyleConfig, make_chart_spec,
                    palette_colors, sample_style, select_columns)
from .tables import (Column, DataTable, decompose_table, impute_missing,
                     impute_table, load_table, merge_tables)

__all__ = [
    "CHART_TYPES", "DISPLAY_NAMES",
    "Annotation", "AnnotationSet", "BoxStats", "ChartGenError",
    "ChartSpec", "Column", "ConfigError", "CorpusConfig", "CorpusError",
    "DataTable", "DecodeError", "EncodeError", "EvaluationError",
    "MatchResult", "Prediction", "QAError", "QAPair", "RenderError",
    "ReservedTokenMap", "SemanticForm", "StyleConfig", "SynthesisError",
    "TableError", "Template", "annotate", "applicable_templates",
    "annotations_as_predictions", "apportion_counts", "attach_text",
    "build_chart", "build_corpus", "bundled_table_dir",
    "config_from_dict", "decode_answer", "decompose_table",
    "default_token_map", "detect_axis_swap", "encode_answer",
    "encode_question", "evaluate_detection", "evaluate_end_to_end",
    "evaluate_qa", "generate_all", "impute_missing", "impute_table",
    "instantiate_template", "layout", "load_config", "load_predictions",
    "load_table", "load_templates", "make_chart_spec", "match_detections",
    "merge_tables", "order_elements", "palette_colors", "precision_recall",
    "qa_accuracy", "render_svg", "sample_style", "score_chart",
    "select_columns", "simulate_ocr", "solve", "validate_corpus",
]
