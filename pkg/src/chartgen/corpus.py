"""Corpus assembly, validation and evaluation orchestration.

:func:`build_corpus` turns a configuration into an on-disk corpus.
Per split, chart types are apportioned over the configured weights by
largest remainder, so realized frequencies track the weights as
closely as integer counts allow.  Every chart is synthesized from a
deterministically drawn table, rendered to SVG, annotated, and given
encoded question-answer records; a manifest with SHA-256 digests of
every artifact is written last.  Chart ``i`` of a split depends only
on the master seed, the split name, the index and the table set, so
the output bytes never depend on worker count.

:func:`validate_corpus` re-checks a corpus from disk: digests, schema
conformance, annotation invariants, answer re-derivation, and count
reconciliation against the manifest.

:func:`evaluate_detection`, :func:`evaluate_qa` and
:func:`evaluate_end_to_end` score prediction files against a corpus.
"""

from __future__ import annotations

import copy
import hashlib
import json
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import encoding
from .annotate import MASKED_CLASSES, annotate
from .annotate import ELEMENT_CLASSES as ANNOTATION_CLASSES
from .annotate import from_json as annotations_from_json
from .annotate import to_json as annotations_to_json
from .errors import (ConfigError, CorpusError, EvaluationError, RenderError,
                     SynthesisError, TableError)
from .evaluate import (Prediction, precision_recall, qa_accuracy,
                       score_chart, simulate_ocr)
from .layout import layout
from .oracle import SemanticForm, solve
from .qa import generate_all
from .rng import derive_seed, rng_for
from .svgout import render_svg
from .synth import CHART_TYPES, ChartSpec, make_chart_spec
from .tables import DataTable, impute_table, load_table

SPLITS = ("train", "test", "novel_test")

# How many table draws a single chart may burn before the build fails.
MAX_TABLE_TRIES = 20

_JSON_COMPACT = {"sort_keys": True, "separators": (",", ":")}


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """One of the bundled JSON schemas, by file name."""
    path = resources.files("chartgen.data.schemas").joinpath(f"{name}.json")
    return json.loads(path.read_text(encoding="utf-8"))


def schema_errors(instance, schema_name: str) -> list:
    """Human-readable validation errors, empty when conforming."""
    validator = jsonschema.Draft202012Validator(load_schema(schema_name))
    out = []
    for err in sorted(validator.iter_errors(instance), key=str):
        where = "/".join(str(p) for p in err.absolute_path) or "(root)"
        out.append(f"{where}: {err.message}")
    return out


@dataclass(frozen=True)
class CorpusConfig:
    """Validated build configuration with resolved paths.

    ``raw`` keeps the configuration exactly as given (paths unresolved)
    and is what the manifest embeds, so corpora built from the same
    file into different locations stay byte-identical.
    """

    master_seed: int
    chart_type_weights: dict  # every chart type present, missing -> 0.0
    charts: dict  # split -> count, missing -> 0
    questions_per_chart: int
    table_dirs: dict  # split -> tuple of resolved Paths
    output_dir: Path
    ocr_noise_rate: float
    raw: dict


def config_from_dict(data: dict, base_dir: Path | str = ".") -> CorpusConfig:
    """Validate a configuration mapping and resolve its paths.

    Relative paths are taken against ``base_dir`` (the directory of
    the config file, for configs loaded from disk).
    """
    problems = schema_errors(data, "config")
    if problems:
        raise ConfigError("invalid config: " + "; ".join(problems))
    base = Path(base_dir)
    weights = {ct: float(data["chart_type_weights"].get(ct, 0.0))
               for ct in CHART_TYPES}
    if sum(weights.values()) <= 0.0:
        raise ConfigError("chart type weights sum to zero")
    charts = {split: int(data["charts"].get(split, 0)) for split in SPLITS}
    table_dirs = {}
    for split in SPLITS:
        dirs = tuple(_resolve_table_dir(d, base)
                     for d in data["table_dirs"].get(split, ()))
        for d in dirs:
            if not d.is_dir():
                raise ConfigError(f"table directory {d} does not exist")
        if charts[split] > 0 and not dirs:
            raise ConfigError(
                f"split {split!r} builds {charts[split]} charts but has "
                "no table directories")
        table_dirs[split] = dirs
    return CorpusConfig(
        master_seed=int(data["master_seed"]),
        chart_type_weights=weights,
        charts=charts,
        questions_per_chart=int(data["questions_per_chart"]),
        table_dirs=table_dirs,
        output_dir=(base / data["output_dir"]).resolve(),
        ocr_noise_rate=float(data.get("ocr_noise_rate", 0.0)),
        raw=copy.deepcopy(data),
    )


def _resolve_table_dir(entry: str, base: Path) -> Path:
    """A table_dirs entry: a path, or "bundled:train" / "bundled:novel".

    The bundled scheme keeps configs (and therefore manifests) free of
    machine-specific paths.
    """
    if entry.startswith("bundled:"):
        return bundled_table_dir(entry.split(":", 1)[1]).resolve()
    return (base / entry).resolve()


def bundled_table_dir(kind: str) -> Path:
    """Directory of the packaged example tables ("train" or "novel")."""
    if kind not in ("train", "novel"):
        raise ConfigError(f"no bundled table set {kind!r}")
    return Path(str(resources.files("chartgen.data") / "tables" / kind))


def load_config(path) -> CorpusConfig:
    """Read and validate a JSON config file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(data, path.parent)


def apportion_counts(weights: dict, total: int) -> dict:
    """Integer chart counts per type, by largest remainder.

    Counts sum to ``total`` exactly and each count differs from the
    ideal ``total * weight / sum(weights)`` by less than one.
    """
    w = np.array([max(0.0, float(weights.get(ct, 0.0)))
                  for ct in CHART_TYPES])
    if w.sum() <= 0.0:
        raise ConfigError("chart type weights sum to zero")
    quota = w * (total / w.sum())
    base = np.floor(quota).astype(int)
    leftover = int(total - base.sum())
    order = sorted(range(len(CHART_TYPES)),
                   key=lambda i: (-(quota[i] - base[i]), i))
    for i in order[:leftover]:
        base[i] += 1
    return {ct: int(base[i]) for i, ct in enumerate(CHART_TYPES)}


def _split_assignments(weights: dict, total: int) -> list:
    counts = apportion_counts(weights, total)
    out = []
    for ct in CHART_TYPES:
        out.extend([ct] * counts[ct])
    return out


def _load_split_tables(dirs) -> tuple:
    """Load every ``*.csv`` under the given directories.

    Returns (tables sorted by file name, {file name: sha256}).  File
    names must be unique across the directories of one split.
    """
    entries = {}
    for d in dirs:
        for path in sorted(Path(d).glob("*.csv")):
            if path.name in entries:
                raise ConfigError(
                    f"duplicate table file name {path.name!r} across "
                    "table directories")
            raw = path.read_bytes()
            entries[path.name] = (load_table(raw, name=path.stem),
                                  hashlib.sha256(raw).hexdigest())
    names = sorted(entries)
    tables = tuple(entries[n][0] for n in names)
    digests = {n: entries[n][1] for n in names}
    return tables, digests


def build_chart(out_root: Path, tables: tuple, master_seed: int,
                quota: int, split: str, index: int,
                chart_type: str) -> dict:
    """Build, render and encode one chart; write its three artifacts.

    The random stream is derived from (master seed, split, index)
    alone.  Tables that cannot support the chart type (or whose slice
    fails a render-time guard) are re-drawn from the same stream, up
    to MAX_TABLE_TRIES; a chart that exhausts its draws fails the
    build with a :class:`CorpusError` naming the chart.
    """
    chart_id = f"{split}_{index:05d}"
    rng = np.random.default_rng(derive_seed(master_seed, split, index))
    spec = scene = None
    last_error = None
    for _ in range(MAX_TABLE_TRIES):
        table = tables[int(rng.integers(len(tables)))]
        try:
            imputed = impute_table(table, rng)
            candidate = make_chart_spec(imputed, chart_type, rng)
            scene = layout(candidate)
            spec = candidate
            break
        except (SynthesisError, RenderError) as exc:
            last_error = exc
    if spec is None:
        raise CorpusError(
            f"{chart_id}: no renderable {chart_type} chart after "
            f"{MAX_TABLE_TRIES} table draws: {last_error}")
    ann = annotate(scene, chart_id)
    svg = render_svg(scene)

    skips = []
    pairs = generate_all(spec, ann, rng, quota=quota, skip_log=skips)
    glyphs = any(e.element_class in encoding.SWAP_CLASSES
                 for e in ann.elements)
    swap = encoding.detect_axis_swap(ann) if glyphs else False
    ordered = encoding.order_elements(ann, swap)
    tokens = encoding.default_token_map()
    records = []
    for k, pair in enumerate(pairs, start=1):
        rec = {"schema_version": "1", "question_id": f"{chart_id}#q{k}"}
        rec.update(pair.to_dict())
        rec["encoded_question"] = encoding.encode_question(
            pair.question, ordered, tokens)
        rec["answer_vector"] = encoding.encode_answer(
            pair.answers, ordered, spec.chart_type)
        records.append(rec)

    split_dir = out_root / split
    artifacts = (
        (f"{chart_id}.svg", svg),
        (f"{chart_id}.annotations.json",
         annotations_to_json(ann).encode("utf-8")),
        (f"{chart_id}.spec.json",
         json.dumps(spec.to_dict(), **_JSON_COMPACT).encode("utf-8")),
    )
    digests = {}
    for name, data in artifacts:
        (split_dir / name).write_bytes(data)
        digests[f"{split}/{name}"] = hashlib.sha256(data).hexdigest()
    return {
        "index": index,
        "chart_id": chart_id,
        "chart_type": chart_type,
        "records": records,
        "skips": [{"chart_id": chart_id, **s} for s in skips],
        "digests": digests,
    }


_WORKER_STATE = {}


def _init_worker(state: dict) -> None:
    _WORKER_STATE.update(state)


def _worker_build(task) -> dict:
    split, index, chart_type = task
    return build_chart(
        Path(_WORKER_STATE["out_root"]), _WORKER_STATE["tables"][split],
        _WORKER_STATE["master_seed"], _WORKER_STATE["quota"],
        split, index, chart_type)


def _write_jsonl(path: Path, rows) -> str:
    data = "".join(json.dumps(r, **_JSON_COMPACT) + "\n" for r in rows)
    raw = data.encode("utf-8")
    path.write_bytes(raw)
    return hashlib.sha256(raw).hexdigest()


def build_corpus(config: CorpusConfig, workers: int = 1,
                 overwrite: bool = False,
                 output_dir: Path | str | None = None) -> dict:
    """Build a corpus on disk and return its manifest.

    ``output_dir`` overrides the configured location without touching
    the manifest's embedded config.  A non-empty target requires
    ``overwrite``; partial output is removed when the build fails.
    """
    out_root = Path(output_dir).resolve() if output_dir else config.output_dir
    if out_root.exists() and any(out_root.iterdir()):
        if not overwrite:
            raise CorpusError(
                f"output directory {out_root} is not empty "
                "(pass overwrite to replace it)")
        shutil.rmtree(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    try:
        return _build_into(config, out_root, workers)
    except BaseException:
        shutil.rmtree(out_root, ignore_errors=True)
        raise


def _build_into(config: CorpusConfig, out_root: Path, workers: int) -> dict:
    tables = {}
    table_digests = {}
    for split in SPLITS:
        dirs = config.table_dirs.get(split, ())
        if dirs:
            tables[split], table_digests[split] = _load_split_tables(dirs)
        else:
            tables[split], table_digests[split] = (), {}
        if config.charts[split] > 0 and not tables[split]:
            raise ConfigError(
                f"split {split!r} has no tables to build charts from")

    held_out = set(table_digests["novel_test"].values())
    shared = held_out & (set(table_digests["train"].values())
                         | set(table_digests["test"].values()))
    if shared:
        names = sorted(n for n, d in table_digests["novel_test"].items()
                       if d in shared)
        raise ConfigError(
            "novel_test tables also appear in train/test table "
            f"directories: {', '.join(names)}")

    tasks = []
    for split in SPLITS:
        if config.charts[split] > 0:
            (out_root / split).mkdir(exist_ok=True)
        for index, chart_type in enumerate(
                _split_assignments(config.chart_type_weights,
                                   config.charts[split])):
            tasks.append((split, index, chart_type))

    state = {
        "out_root": str(out_root),
        "tables": tables,
        "master_seed": config.master_seed,
        "quota": config.questions_per_chart,
    }
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(
                max_workers=workers, initializer=_init_worker,
                initargs=(state,)) as pool:
            results = list(pool.map(_worker_build, tasks, chunksize=8))
    else:
        _init_worker(state)
        results = [_worker_build(t) for t in tasks]

    digests = {}
    splits_out = {}
    by_split = {split: [] for split in SPLITS}
    for res in results:
        by_split[res["chart_id"].rsplit("_", 1)[0]].append(res)
    for split in SPLITS:
        rows = sorted(by_split[split], key=lambda r: r["index"])
        by_type = {}
        by_qtype = {}
        by_atype = {}
        records = []
        skipped = []
        for res in rows:
            digests.update(res["digests"])
            by_type[res["chart_type"]] = by_type.get(res["chart_type"], 0) + 1
            records.extend(res["records"])
            skipped.extend(res["skips"])
        for rec in records:
            qt = rec["question_type"]
            at = rec["answer_type"]
            by_qtype[qt] = by_qtype.get(qt, 0) + 1
            by_atype[at] = by_atype.get(at, 0) + 1
        if rows:
            digests[f"{split}/qa.jsonl"] = _write_jsonl(
                out_root / split / "qa.jsonl", records)
            digests[f"{split}/skipped.jsonl"] = _write_jsonl(
                out_root / split / "skipped.jsonl", skipped)
        splits_out[split] = {
            "charts": len(rows),
            "by_chart_type": by_type,
            "questions": len(records),
            "by_question_type": by_qtype,
            "by_answer_type": by_atype,
            "skipped_questions": len(skipped),
            "table_digests": table_digests[split],
        }

    manifest = {
        "schema_version": "1",
        "config": config.raw,
        "splits": splits_out,
        "digests": digests,
    }
    problems = schema_errors(manifest, "manifest")
    if problems:
        raise CorpusError("internal error: manifest does not conform: "
                          + "; ".join(problems))
    (out_root / "manifest.json").write_text(
        json.dumps(manifest, **_JSON_COMPACT) + "\n", encoding="utf-8")
    return manifest


# ---------------------------------------------------------------------------
# Validation


def _check_annotation_file(path: Path, problems: list) -> object:
    try:
        ann = annotations_from_json(path.read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as exc:
        problems.append(f"{path.name}: unreadable annotations: {exc}")
        return None
    width, height = ann.canvas
    for k, el in enumerate(ann.elements):
        where = f"{path.name}[{k}]"
        if el.element_class not in ANNOTATION_CLASSES:
            problems.append(f"{where}: unknown class {el.element_class!r}")
        x0, y0, x1, y1 = el.box
        if not (x0 <= x1 and y0 <= y1):
            problems.append(f"{where}: degenerate box {el.box}")
        if x0 < -0.01 or y0 < -0.01 or x1 > width + 0.01 or y1 > height + 0.01:
            problems.append(f"{where}: box {el.box} leaves the canvas")
        if el.mask and el.element_class not in MASKED_CLASSES:
            problems.append(f"{where}: mask on unmasked class "
                            f"{el.element_class!r}")
        if el.element_class in MASKED_CLASSES and not el.mask:
            problems.append(f"{where}: missing mask")
    return ann


def _check_qa_record(rec: dict, charts: dict, problems: list) -> None:
    qid = rec.get("question_id", "?")
    errs = schema_errors(rec, "qa_record")
    if errs:
        problems.append(f"{qid}: schema: " + "; ".join(errs))
        return
    entry = charts.get(rec["chart_id"])
    if entry is None:
        problems.append(f"{qid}: unknown chart {rec['chart_id']}")
        return
    spec, ordered = entry
    try:
        derived = solve(SemanticForm.from_dict(rec["semantic_form"]), spec)
    except Exception as exc:  # noqa: BLE001 - report, keep validating
        problems.append(f"{qid}: answer re-derivation failed: {exc}")
        return
    if sorted(derived) != rec["answers"]:
        problems.append(
            f"{qid}: stored answers {rec['answers']} != derived "
            f"{sorted(derived)}")
    try:
        vector = encoding.encode_answer(rec["answers"], ordered,
                                        spec.chart_type)
        encoded = encoding.encode_question(rec["question"], ordered,
                                           encoding.default_token_map())
    except Exception as exc:  # noqa: BLE001 - report, keep validating
        problems.append(f"{qid}: re-encoding failed: {exc}")
        return
    if vector != rec["answer_vector"]:
        problems.append(f"{qid}: stored answer vector does not re-derive")
    if encoded != rec["encoded_question"]:
        problems.append(f"{qid}: stored encoded question does not re-derive")


def validate_corpus(corpus_dir) -> list:
    """Re-check a corpus on disk; returns a list of problems (empty
    when the corpus is valid).

    Checks: manifest schema, file digests (and absence of stray
    files), annotation invariants, QA record schema, re-derivation of
    every answer set / answer vector / encoded question, count
    reconciliation, and held-out table hygiene.
    """
    root = Path(corpus_dir)
    problems = []
    manifest_path = root / "manifest.json"
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        return [f"cannot read manifest: {exc}"]
    errs = schema_errors(manifest, "manifest")
    if errs:
        return ["manifest schema: " + "; ".join(errs)]

    digests = manifest["digests"]
    on_disk = {p.relative_to(root).as_posix()
               for p in root.rglob("*") if p.is_file()}
    on_disk.discard("manifest.json")
    for rel in sorted(set(digests) - on_disk):
        problems.append(f"{rel}: listed in manifest but missing")
    for rel in sorted(on_disk - set(digests)):
        problems.append(f"{rel}: on disk but not in manifest")
    for rel in sorted(set(digests) & on_disk):
        actual = hashlib.sha256((root / rel).read_bytes()).hexdigest()
        if actual != digests[rel]:
            problems.append(f"{rel}: digest mismatch")

    held_out = set(
        manifest["splits"].get("novel_test", {})
        .get("table_digests", {}).values())
    for split in ("train", "test"):
        other = set(manifest["splits"].get(split, {})
                    .get("table_digests", {}).values())
        if held_out & other:
            problems.append(
                f"novel_test tables shared with {split} tables")

    for split, section in sorted(manifest["splits"].items()):
        split_dir = root / split
        spec_paths = (sorted(split_dir.glob("*.spec.json"))
                      if split_dir.is_dir() else [])
        if len(spec_paths) != section["charts"]:
            problems.append(
                f"{split}: manifest says {section['charts']} charts, "
                f"found {len(spec_paths)}")
        charts = {}
        by_type = {}
        for spec_path in spec_paths:
            chart_id = spec_path.name[:-len(".spec.json")]
            try:
                spec = ChartSpec.from_dict(
                    json.loads(spec_path.read_text(encoding="utf-8")))
            except Exception as exc:  # noqa: BLE001
                problems.append(f"{spec_path.name}: unreadable spec: {exc}")
                continue
            by_type[spec.chart_type] = by_type.get(spec.chart_type, 0) + 1
            ann = _check_annotation_file(
                split_dir / f"{chart_id}.annotations.json", problems)
            if ann is None:
                continue
            glyphs = any(e.element_class in encoding.SWAP_CLASSES
                         for e in ann.elements)
            swap = encoding.detect_axis_swap(ann) if glyphs else False
            charts[chart_id] = (spec, encoding.order_elements(ann, swap))
        if by_type != section["by_chart_type"]:
            problems.append(
                f"{split}: chart type counts {by_type} != manifest "
                f"{section['by_chart_type']}")

        qa_path = split_dir / "qa.jsonl"
        records = []
        if qa_path.is_file():
            for k, line in enumerate(
                    qa_path.read_text(encoding="utf-8").splitlines(), 1):
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    problems.append(f"{split}/qa.jsonl:{k}: bad JSON: {exc}")
        elif section["questions"]:
            problems.append(f"{split}: qa.jsonl missing")
        if len(records) != section["questions"]:
            problems.append(
                f"{split}: manifest says {section['questions']} questions, "
                f"found {len(records)}")
        by_qtype = {}
        by_atype = {}
        seen_qids = set()
        for rec in records:
            _check_qa_record(rec, charts, problems)
            qid = rec.get("question_id")
            if qid in seen_qids:
                problems.append(f"{qid}: duplicate question id")
            seen_qids.add(qid)
            if "question_type" in rec:
                by_qtype[rec["question_type"]] = (
                    by_qtype.get(rec["question_type"], 0) + 1)
            if "answer_type" in rec:
                by_atype[rec["answer_type"]] = (
                    by_atype.get(rec["answer_type"], 0) + 1)
        if by_qtype != section["by_question_type"]:
            problems.append(
                f"{split}: question type counts {by_qtype} != manifest "
                f"{section['by_question_type']}")
        if by_atype != section["by_answer_type"]:
            problems.append(
                f"{split}: answer type counts {by_atype} != manifest "
                f"{section['by_answer_type']}")

        skipped_path = split_dir / "skipped.jsonl"
        n_skipped = 0
        if skipped_path.is_file():
            n_skipped = len(
                skipped_path.read_text(encoding="utf-8").splitlines())
        if n_skipped != section["skipped_questions"]:
            problems.append(
                f"{split}: manifest says {section['skipped_questions']} "
                f"skipped questions, found {n_skipped}")
    return problems


# ---------------------------------------------------------------------------
# Evaluation


def load_predictions(path) -> tuple:
    """Parse a predictions JSONL file.

    Returns ``(detections, answers)``: detections grouped by chart id
    in input order, and QA answers by question id.  Every line must
    match the prediction schema.
    """
    path = Path(path)
    detections = {}
    answers = {}
    for k, line in enumerate(
            path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EvaluationError(
                f"{path.name}:{k}: not valid JSON: {exc}") from None
        errs = schema_errors(data, "predictions")
        if errs:
            raise EvaluationError(
                f"{path.name}:{k}: " + "; ".join(errs))
        if "question_id" in data:
            if data["question_id"] in answers:
                raise EvaluationError(
                    f"{path.name}:{k}: duplicate answer for "
                    f"{data['question_id']!r}")
            answers[data["question_id"]] = data["answer"]
        else:
            pred = Prediction.from_dict(data)
            detections.setdefault(pred.chart_id, []).append(pred)
    return detections, answers


def corpus_charts(corpus_dir) -> list:
    """(split, chart_id) pairs of a corpus, in deterministic order."""
    root = Path(corpus_dir)
    out = []
    for split_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for path in sorted(split_dir.glob("*.annotations.json")):
            out.append((split_dir.name,
                        path.name[:-len(".annotations.json")]))
    return out


def load_annotations(corpus_dir, split: str, chart_id: str):
    path = Path(corpus_dir) / split / f"{chart_id}.annotations.json"
    return annotations_from_json(path.read_text(encoding="utf-8"))


def corpus_qa_records(corpus_dir) -> list:
    """Every QA record of a corpus, across splits, in file order."""
    root = Path(corpus_dir)
    records = []
    for split_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        qa_path = split_dir / "qa.jsonl"
        if qa_path.is_file():
            for line in qa_path.read_text(encoding="utf-8").splitlines():
                records.append(json.loads(line))
    return records


def _reject_unknown_charts(detections: dict, known) -> None:
    unknown = set(detections) - set(known)
    if unknown:
        raise EvaluationError(
            f"predictions reference unknown chart ids: "
            f"{sorted(unknown)[:5]}")


def evaluate_detection(corpus_dir, detections: dict) -> dict:
    """Per-class precision/recall of detections against a corpus."""
    charts = corpus_charts(corpus_dir)
    _reject_unknown_charts(detections, (cid for _, cid in charts))
    scores = []
    for split, chart_id in charts:
        truth = load_annotations(corpus_dir, split, chart_id)
        width, height = truth.canvas
        preds = [p.clipped(width, height)
                 for p in detections.get(chart_id, [])]
        scores.append(score_chart(preds, truth))
    return precision_recall(scores)


def evaluate_qa(corpus_dir, answers: dict) -> dict:
    """Exact-match QA accuracy of predicted answers against a corpus."""
    return qa_accuracy(answers, corpus_qa_records(corpus_dir))


def evaluate_end_to_end(corpus_dir, detections: dict,
                        ocr_rate: float = 0.0, ocr_seed: int = 0) -> dict:
    """Answer questions from detections alone, then score them.

    Detected text boxes receive their strings from ground truth by
    IoU attachment (optionally corrupted at ``ocr_rate`` per
    character), elements are ordered from the detected geometry, and
    each stored answer vector is decoded against that ordering.  The
    result is QA accuracy as a function of detection and text quality.
    """
    charts = corpus_charts(corpus_dir)
    _reject_unknown_charts(detections, (cid for _, cid in charts))
    records = corpus_qa_records(corpus_dir)
    by_chart = {}
    for rec in records:
        by_chart.setdefault(rec["chart_id"], []).append(rec)
    predicted = {}
    for split, chart_id in charts:
        chart_records = by_chart.get(chart_id, [])
        if not chart_records:
            continue
        truth = load_annotations(corpus_dir, split, chart_id)
        triples = [(p.element_class, p.box, p.confidence)
                   for p in detections.get(chart_id, [])]
        provider = None
        if ocr_rate > 0.0:
            chart_rng = rng_for(ocr_seed, "ocr", chart_id)
            provider = (lambda text, rng=chart_rng:
                        simulate_ocr([text], rng, ocr_rate)[0])
        attached = encoding.attach_text(triples, truth,
                                        text_provider=provider)
        glyphs = any(cls in encoding.SWAP_CLASSES
                     for cls, _, _ in attached)
        swap = encoding.detect_axis_swap(attached) if glyphs else False
        ordered = encoding.order_elements(attached, swap)
        for rec in chart_records:
            predicted[rec["question_id"]] = encoding.decode_answer(
                rec["answer_vector"], ordered)
    return qa_accuracy(predicted, records)
