"""Evaluation harness: sentence-level binary F1 against annotated datasets.

Datasets are JSON-lines records with per-sentence gold labels (1 = contains
a factual error).  Each record runs through the pipeline; a sentence is
predicted not-factual when its credibility score falls strictly below the
threshold.  Metrics are pooled (micro) over all sentences of a subset.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import DomainError
from .model import CredibilityReport, PipelineConfig, render_fraction
from .pipeline import run_verification
from .segmentation import segment_text

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalRecord:
    id: str
    text: str
    gold_sentence_labels: tuple[int, ...]
    subset: str = "default"


def sentence_labels_from_spans(
    text: str, error_spans: Sequence[tuple[int, int]]
) -> list[int]:
    """Convert span-level error annotations to per-sentence binary labels.

    A sentence is labeled 1 when any annotated character span [start, end)
    overlaps it.  This is the bridge from span-annotated corpora to the
    JSON-lines dataset format consumed by run_eval.
    """
    segmented = segment_text(text)
    labels = []
    for start, end in error_spans:
        if not (0 <= start < end <= len(text)):
            raise DomainError(f"span ({start}, {end}) outside the text")
    for s_start, s_end in segmented.sentence_spans:
        hit = any(start < s_end and end > s_start for start, end in error_spans)
        labels.append(1 if hit else 0)
    return labels


def load_dataset(path: str | Path) -> list[EvalRecord]:
    records = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                labels = tuple(int(v) for v in raw["gold_sentence_labels"])
                if any(v not in (0, 1) for v in labels):
                    raise ValueError("labels must be 0 or 1")
                records.append(
                    EvalRecord(
                        id=str(raw["id"]),
                        text=raw["text"],
                        gold_sentence_labels=labels,
                        subset=str(raw.get("subset", "default")),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise DomainError(f"bad dataset record on line {line_no}: {exc}") from exc
    if not records:
        raise DomainError(f"dataset {path} contains no records")
    return records


def compute_binary_f1(
    predictions: Sequence[int], gold: Sequence[int]
) -> tuple[Fraction, Fraction, Fraction]:
    """Precision/recall/F1 for the positive (not-factual) class.

    Zero denominators yield 0 by convention, including F1 when both
    precision and recall are 0.
    """
    if len(predictions) != len(gold):
        raise DomainError("predictions and gold must have equal length")
    if not predictions:
        raise DomainError("predictions must be non-empty")
    tp = sum(1 for p, g in zip(predictions, gold) if p == 1 and g == 1)
    fp = sum(1 for p, g in zip(predictions, gold) if p == 1 and g == 0)
    fn = sum(1 for p, g in zip(predictions, gold) if p == 0 and g == 1)
    precision = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
    recall = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else Fraction(0)
    )
    return precision, recall, f1


def predict_sentence_labels(report: CredibilityReport) -> list[int]:
    """1 (not-factual) when a sentence's score is strictly below the threshold.

    Sentences without a score (no claims, unverified) are predicted 0: with
    no countable evidence the system has no ground to flag them.
    """
    labels = []
    for sentence in sorted(report.sentences, key=lambda s: s.index):
        score = report.sentence_scores.get(sentence.index)
        labels.append(1 if score is not None and score < report.config.threshold_t else 0)
    return labels


@dataclass(frozen=True)
class SubsetMetrics:
    precision: Fraction
    recall: Fraction
    f1: Fraction
    tp: int
    fp: int
    fn: int
    tn: int
    sentences: int
    records: int

    def to_tree(self) -> dict[str, Any]:
        return {
            "precision": render_fraction(self.precision),
            "recall": render_fraction(self.recall),
            "f1": render_fraction(self.f1),
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "sentences": self.sentences,
            "records": self.records,
        }


@dataclass(frozen=True)
class EvalRow:
    top_n_results: int
    context_window_m: int
    subsets: dict[str, SubsetMetrics]

    def to_tree(self) -> dict[str, Any]:
        return {
            "top_n_results": self.top_n_results,
            "context_window_m": self.context_window_m,
            "subsets": {name: m.to_tree() for name, m in sorted(self.subsets.items())},
        }


@dataclass(frozen=True)
class EvalResult:
    rows: tuple[EvalRow, ...]
    records: int
    skipped: int

    def to_tree(self) -> dict[str, Any]:
        return {
            "rows": [row.to_tree() for row in self.rows],
            "records": self.records,
            "skipped": self.skipped,
        }


def _pool(pairs: Iterable[tuple[list[int], list[int]]], records: int) -> SubsetMetrics:
    predictions: list[int] = []
    gold: list[int] = []
    for p, g in pairs:
        predictions.extend(p)
        gold.extend(g)
    precision, recall, f1 = compute_binary_f1(predictions, gold)
    tp = sum(1 for p, g in zip(predictions, gold) if p == 1 and g == 1)
    fp = sum(1 for p, g in zip(predictions, gold) if p == 1 and g == 0)
    fn = sum(1 for p, g in zip(predictions, gold) if p == 0 and g == 1)
    tn = len(gold) - tp - fp - fn
    return SubsetMetrics(
        precision=precision,
        recall=recall,
        f1=f1,
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        sentences=len(gold),
        records=records,
    )


def run_eval(
    dataset: Sequence[EvalRecord],
    config: PipelineConfig,
    gateway,
    *,
    sweep: Sequence[tuple[int, int]] | None = None,
    categorizer=None,
    parallel: int = 1,
) -> EvalResult:
    """Run the pipeline per record and pool sentence-level metrics.

    ``sweep`` is a list of (top_n_results, context_window_m) points; without
    one, the given config is the single row.  Records whose label count does
    not match the segmenter's sentence count are skipped with a warning.
    Records run sequentially unless ``parallel`` > 1; results assemble in
    dataset order either way.
    """
    usable: list[EvalRecord] = []
    skipped = 0
    for record in dataset:
        sentence_count = len(segment_text(record.text).sentences)
        if sentence_count != len(record.gold_sentence_labels):
            log.warning(
                "record %s: %d labels but %d sentences; skipping",
                record.id,
                len(record.gold_sentence_labels),
                sentence_count,
            )
            skipped += 1
            continue
        usable.append(record)
    if not usable:
        raise DomainError("no usable records in dataset")
    points = list(sweep) if sweep else [(config.top_n_results, config.context_window_m)]
    rows = []
    for top_n, context_m in points:
        row_config = replace(config, top_n_results=top_n, context_window_m=context_m)

        def verify_record(record: EvalRecord) -> list[int]:
            report = run_verification(
                record.text, row_config, gateway, categorizer=categorizer
            )
            return predict_sentence_labels(report)

        if parallel > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=parallel) as pool:
                all_predictions = list(pool.map(verify_record, usable))
        else:
            all_predictions = [verify_record(record) for record in usable]

        by_subset: dict[str, list[tuple[list[int], list[int]]]] = {}
        record_counts: dict[str, int] = {}
        for record, predictions in zip(usable, all_predictions):
            pair = (predictions, list(record.gold_sentence_labels))
            by_subset.setdefault(record.subset, []).append(pair)
            by_subset.setdefault("overall", []).append(pair)
            record_counts[record.subset] = record_counts.get(record.subset, 0) + 1
            record_counts["overall"] = record_counts.get("overall", 0) + 1
        subsets = {
            name: _pool(pairs, record_counts[name]) for name, pairs in by_subset.items()
        }
        rows.append(
            EvalRow(top_n_results=top_n, context_window_m=context_m, subsets=subsets)
        )
    return EvalResult(rows=tuple(rows), records=len(usable), skipped=skipped)


def parse_sweep(specs: Sequence[str]) -> list[tuple[int, int]]:
    """Parse sweep specs like "evidences=1,3 context=15,30" into grid points."""
    values: dict[str, list[int]] = {}
    for spec in specs:
        for assignment in spec.split():
            if "=" not in assignment:
                raise DomainError(f"bad sweep assignment {assignment!r}")
            key, _, raw = assignment.partition("=")
            key = key.strip().lower()
            if key in ("evidences", "evidence", "top_n_results"):
                key = "evidences"
            elif key in ("context", "ctxt", "context_window_m"):
                key = "context"
            else:
                raise DomainError(f"unknown sweep dimension {key!r}")
            try:
                values[key] = [int(v) for v in raw.split(",") if v.strip()]
            except ValueError as exc:
                raise DomainError(f"bad sweep values {raw!r}") from exc
            if not values[key]:
                raise DomainError(f"empty sweep values for {key}")
    if not values:
        raise DomainError("sweep spec is empty")
    evidences = values.get("evidences", [])
    contexts = values.get("context", [])
    if not evidences or not contexts:
        raise DomainError("sweep needs both evidences=... and context=...")
    return [(n, m) for n in evidences for m in contexts]
