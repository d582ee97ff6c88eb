"""Aggregates judgments into credibility scores and recomputes them under
user selection masks.

Scores are the exact fraction supported/total per sentence; the document
score is the arithmetic mean of present sentence scores, with the pooled
ratio (sum of supports over sum of totals) exposed alongside it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .errors import DomainError, UnknownEvidenceId
from .model import (
    Bucket,
    Classification,
    CredibilityReport,
    EvidencePassage,
    Judgment,
    PipelineConfig,
    SentenceStatus,
    SourceCategory,
    Verdict,
    assign_bucket,
    render_fraction,
)


@dataclass(frozen=True)
class SelectionMask:
    """User-chosen exclusions; an empty mask includes everything."""

    excluded_evidence_ids: frozenset[str] = frozenset()
    excluded_categories: frozenset[SourceCategory] = frozenset()

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "SelectionMask":
        known = {"excluded_evidence_ids", "excluded_categories"}
        unknown = set(raw) - known
        if unknown:
            raise DomainError(f"unknown mask fields: {sorted(unknown)}")
        try:
            categories = frozenset(
                SourceCategory(c) for c in raw.get("excluded_categories", ())
            )
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
        return cls(
            excluded_evidence_ids=frozenset(raw.get("excluded_evidence_ids", ())),
            excluded_categories=categories,
        )

    def includes(self, passage: EvidencePassage) -> bool:
        return (
            passage.id not in self.excluded_evidence_ids
            and passage.category not in self.excluded_categories
        )


EMPTY_MASK = SelectionMask()


@dataclass(frozen=True)
class ScoreBreakdown:
    sentence_scores: dict[int, Fraction]
    overall_score: Fraction | None
    pooled_score: Fraction | None
    per_sentence_counts: dict[int, tuple[int, int]]
    classification: dict[int, Classification]
    buckets: dict[int, Bucket] = field(default_factory=dict)

    def to_tree(self) -> dict[str, Any]:
        """Plain-JSON form used by the recompute API response."""

        def _frac(frac: Fraction | None) -> dict[str, Any] | None:
            if frac is None:
                return None
            return {
                "num": frac.numerator,
                "den": frac.denominator,
                "value": render_fraction(frac),
                "bucket": assign_bucket(frac).value,
            }

        return {
            "sentence_scores": {
                str(i): {
                    "support": self.per_sentence_counts[i][0],
                    "total": self.per_sentence_counts[i][1],
                    "value": render_fraction(score),
                    "bucket": self.buckets[i].value,
                    "classification": self.classification[i].value,
                }
                for i, score in sorted(self.sentence_scores.items())
            },
            "per_sentence_counts": {
                str(i): {"support": s, "total": t}
                for i, (s, t) in sorted(self.per_sentence_counts.items())
            },
            "overall_score": _frac(self.overall_score),
            "pooled_score": _frac(self.pooled_score),
        }


def score_sentence(
    judgments: Iterable[Judgment],
    evidence_by_id: Mapping[str, EvidencePassage],
    mask: SelectionMask,
    config: PipelineConfig,
) -> tuple[Fraction | None, tuple[int, int]]:
    """Pool included judgments across one sentence's claims into a score.

    Returns (score, (support, total)); the score is absent when the counted
    total is zero.  Irrelevant verdicts count in the total unless the config
    opts out.
    """
    support = 0
    total = 0
    for judgment in judgments:
        passage = evidence_by_id[judgment.evidence_id]
        if not mask.includes(passage):
            continue
        if judgment.verdict is Verdict.IRRELEVANT and not config.count_irrelevant_in_total:
            continue
        total += 1
        if judgment.verdict is Verdict.SUPPORTED:
            support += 1
    if total == 0:
        return None, (support, 0)
    return Fraction(support, total), (support, total)


def score_document(sentence_scores: Mapping[int, Fraction]) -> Fraction | None:
    """Arithmetic mean of present sentence scores; absent when none present."""
    if not sentence_scores:
        return None
    return Fraction(sum(sentence_scores.values()), len(sentence_scores))


def pooled_document_score(counts: Mapping[int, tuple[int, int]]) -> Fraction | None:
    """Ratio of all supports over all counted judgments across sentences."""
    support = sum(s for s, _ in counts.values())
    total = sum(t for _, t in counts.values())
    if total == 0:
        return None
    return Fraction(support, total)


def classify_sentence(score: Fraction, threshold_t: Fraction) -> Classification:
    """Not-factual exactly when the score is strictly below the threshold."""
    return Classification.NOT_FACTUAL if score < threshold_t else Classification.FACTUAL


def judgments_by_sentence(report: CredibilityReport) -> dict[int, list[Judgment]]:
    claim_sentence = {
        claim.id: sentence.index
        for sentence in report.sentences
        for claim in sentence.claims
    }
    grouped: dict[int, list[Judgment]] = {}
    for judgment in report.judgments:
        grouped.setdefault(claim_sentence[judgment.claim_id], []).append(judgment)
    return grouped


def sentence_judgment_counts(
    report: CredibilityReport, mask: SelectionMask = EMPTY_MASK
) -> dict[int, tuple[int, int]]:
    """(support, total) per sentence under a mask, honoring the config flag."""
    evidence_by_id = {passage.id: passage for passage in report.evidence}
    counts: dict[int, tuple[int, int]] = {}
    for index, judgments in judgments_by_sentence(report).items():
        _, pair = score_sentence(judgments, evidence_by_id, mask, report.config)
        counts[index] = pair
    return counts


def apply_selection(report: CredibilityReport, mask: SelectionMask) -> ScoreBreakdown:
    """Recompute every score from stored judgments under the mask.

    Pure over the report: no pipeline stage re-runs, no mutation.  Sentences
    whose included total drops to zero lose their score (shown unverified).
    """
    evidence_ids = {passage.id for passage in report.evidence}
    unknown = mask.excluded_evidence_ids - evidence_ids
    if unknown:
        raise UnknownEvidenceId(f"unknown evidence ids: {sorted(unknown)}")
    evidence_by_id = {passage.id: passage for passage in report.evidence}
    statuses = {sentence.index: sentence.status for sentence in report.sentences}
    grouped = judgments_by_sentence(report)
    sentence_scores: dict[int, Fraction] = {}
    per_counts: dict[int, tuple[int, int]] = {}
    classification: dict[int, Classification] = {}
    buckets: dict[int, Bucket] = {}
    for index, judgments in sorted(grouped.items()):
        if statuses[index] is not SentenceStatus.VERIFIED:
            continue
        score, pair = score_sentence(judgments, evidence_by_id, mask, report.config)
        per_counts[index] = pair
        if score is None:
            continue
        sentence_scores[index] = score
        classification[index] = classify_sentence(score, report.config.threshold_t)
        buckets[index] = assign_bucket(score)
    return ScoreBreakdown(
        sentence_scores=sentence_scores,
        overall_score=score_document(sentence_scores),
        pooled_score=pooled_document_score(per_counts),
        per_sentence_counts=per_counts,
        classification=classification,
        buckets=buckets,
    )
