"""Shared domain types, score buckets, and the canonical report serialization.

Credibility arithmetic uses exact rationals (`fractions.Fraction`) end to end
so that bucket and threshold boundaries like 3/10 and 6/10 compare exactly;
floats only appear at render time.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Mapping

from .errors import DomainError, ReportIntegrityError


class RetrievalMode(str, Enum):
    DENSE = "dense"
    SPARSE = "sparse"


class SourceCategory(str, Enum):
    NEWS = "news"
    BLOG = "blog"
    WIKI = "wiki"
    SOCIAL_MEDIA = "social_media"
    SCIENTIFIC_MEDICAL_ARTICLE = "scientific_medical_article"
    GOVERNMENT_WEBSITE = "government_website"
    OTHER = "other"


#: Label variants that normalize onto the seven canonical categories.  The
#: classification prompt offers "etc" as a catch-all; it and the spaced or
#: slashed spellings all collapse onto one enum value.
CATEGORY_ALIASES: dict[str, SourceCategory] = {
    "etc": SourceCategory.OTHER,
    "other": SourceCategory.OTHER,
    "social media": SourceCategory.SOCIAL_MEDIA,
    "scientific/medical article": SourceCategory.SCIENTIFIC_MEDICAL_ARTICLE,
    "scientific medical article": SourceCategory.SCIENTIFIC_MEDICAL_ARTICLE,
    "government website": SourceCategory.GOVERNMENT_WEBSITE,
}


class Verdict(str, Enum):
    SUPPORTED = "supported"
    NOT_SUPPORTED = "not_supported"
    IRRELEVANT = "irrelevant"


class SentenceStatus(str, Enum):
    VERIFIED = "verified"
    NO_CLAIMS = "no_claims"
    UNVERIFIED = "unverified"


class Bucket(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class Classification(str, Enum):
    FACTUAL = "factual"
    NOT_FACTUAL = "not_factual"


_BUCKET_MEDIUM = Fraction(3, 10)
_BUCKET_HIGH = Fraction(6, 10)


def as_fraction(value: Any) -> Fraction:
    """Coerce a score-like value to an exact Fraction.

    Floats are interpreted through their shortest decimal representation, so
    ``as_fraction(0.3) == Fraction(3, 10)`` rather than the binary neighbour
    just below it.  Strings accept decimals ("0.3") and ratios ("1/3").
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a score: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a score: {value!r}") from exc
    raise DomainError(f"not a score: {value!r}")


def assign_bucket(score: Any) -> Bucket:
    """Map a credibility score in [0, 1] to its display bucket.

    Intervals are [0, 0.3) low, [0.3, 0.6) medium, [0.6, 1] high; the
    boundaries belong to the upper bucket.
    """
    frac = as_fraction(score)
    if frac < 0 or frac > 1:
        raise DomainError(f"score {frac} outside [0, 1]")
    if frac < _BUCKET_MEDIUM:
        return Bucket.LOW
    if frac < _BUCKET_HIGH:
        return Bucket.MEDIUM
    return Bucket.HIGH


def render_fraction(frac: Fraction) -> str:
    """Render a rational at exactly 4 decimal places (half-even, integer math)."""
    sign = "-" if frac < 0 else ""
    n, d = abs(frac.numerator), frac.denominator
    q, r = divmod(n * 10000, d)
    if 2 * r > d or (2 * r == d and q % 2 == 1):
        q += 1
    return f"{sign}{q // 10000}.{q % 10000:04d}"


def fraction_to_json(frac: Fraction) -> str:
    """Compact exact text form: a decimal when one round-trips, else "num/den"."""
    if frac.denominator == 1:
        return str(frac.numerator)
    try:
        text = repr(float(frac))
        if Fraction(text) == frac:
            return text
    except OverflowError:
        pass
    return f"{frac.numerator}/{frac.denominator}"


@dataclass(frozen=True)
class PipelineConfig:
    """All user-facing knobs of one verification run."""

    llm_profile: str = "primary"
    retrieval_mode: RetrievalMode = RetrievalMode.SPARSE
    top_n_results: int = 3
    top_k_passages: int = 1
    context_window_m: int = 15
    threshold_t: Fraction = Fraction(3, 10)
    count_irrelevant_in_total: bool = True
    parallelism: int = 4

    def __post_init__(self) -> None:
        if not self.llm_profile:
            raise DomainError("llm_profile must be non-empty")
        if self.top_n_results < 1:
            raise DomainError("top_n_results must be >= 1")
        if self.top_k_passages < 1:
            raise DomainError("top_k_passages must be >= 1")
        if self.context_window_m < 0:
            raise DomainError("context_window_m must be >= 0")
        if not 0 <= self.threshold_t <= 1:
            raise DomainError("threshold_t must be within [0, 1]")
        if self.parallelism < 1:
            raise DomainError("parallelism must be >= 1")

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        kwargs: dict[str, Any] = dict(raw)
        if "retrieval_mode" in kwargs:
            try:
                kwargs["retrieval_mode"] = RetrievalMode(kwargs["retrieval_mode"])
            except ValueError as exc:
                raise DomainError(str(exc)) from exc
        if "threshold_t" in kwargs:
            kwargs["threshold_t"] = as_fraction(kwargs["threshold_t"])
        for name in ("top_n_results", "top_k_passages", "context_window_m", "parallelism"):
            if name in kwargs and not isinstance(kwargs[name], int):
                raise DomainError(f"{name} must be an integer")
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "llm_profile": self.llm_profile,
            "retrieval_mode": self.retrieval_mode.value,
            "top_n_results": self.top_n_results,
            "top_k_passages": self.top_k_passages,
            "context_window_m": self.context_window_m,
            "threshold_t": fraction_to_json(self.threshold_t),
            "count_irrelevant_in_total": self.count_irrelevant_in_total,
            "parallelism": self.parallelism,
        }


@dataclass(frozen=True)
class AtomicClaim:
    """A decontextualized, standalone factual statement tied to one sentence."""

    id: str
    sentence_index: int
    text: str
    query: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise DomainError("claim text must be non-empty")
        if not self.query.strip():
            raise DomainError("claim query must be non-empty")


@dataclass(frozen=True)
class SentenceUnit:
    index: int
    text: str
    claims: tuple[AtomicClaim, ...] = ()
    status: SentenceStatus = SentenceStatus.UNVERIFIED
    error: str | None = None


@dataclass(frozen=True)
class EvidencePassage:
    """A contiguous sentence window cut from one fetched web document."""

    id: str
    claim_id: str
    url: str
    hostname: str
    category: SourceCategory
    match_sentence_index: int
    window_start: int
    window_end: int
    text: str
    relevance_score: float
    snippet_fallback: bool = False

    def __post_init__(self) -> None:
        if not self.window_start <= self.match_sentence_index <= self.window_end:
            raise DomainError("match index must fall within the window")


@dataclass(frozen=True)
class Judgment:
    claim_id: str
    evidence_id: str
    verdict: Verdict
    rationale: str

    def __post_init__(self) -> None:
        if self.verdict is not Verdict.IRRELEVANT and not self.rationale:
            raise DomainError("rationale may be empty only for irrelevant verdicts")


@dataclass(frozen=True)
class CredibilityReport:
    """The full verification tree: sentences -> claims -> evidence -> judgments."""

    job_id: str
    input_text: str
    sentences: tuple[SentenceUnit, ...]
    evidence: tuple[EvidencePassage, ...]
    judgments: tuple[Judgment, ...]
    sentence_scores: dict[int, Fraction] = field(default_factory=dict)
    overall_score: Fraction | None = None
    config: PipelineConfig = field(default_factory=PipelineConfig)


def validate_report(report: CredibilityReport) -> None:
    """Check referential integrity; raises ReportIntegrityError on violations."""
    claim_ids: set[str] = set()
    sentence_indices = set()
    for sentence in report.sentences:
        if sentence.index in sentence_indices:
            raise ReportIntegrityError(f"duplicate sentence index {sentence.index}")
        sentence_indices.add(sentence.index)
        for claim in sentence.claims:
            if claim.id in claim_ids:
                raise ReportIntegrityError(f"duplicate claim id {claim.id}")
            if claim.sentence_index != sentence.index:
                raise ReportIntegrityError(f"claim {claim.id} attached to wrong sentence")
            claim_ids.add(claim.id)
    evidence_ids: set[str] = set()
    for passage in report.evidence:
        if passage.id in evidence_ids:
            raise ReportIntegrityError(f"duplicate evidence id {passage.id}")
        if passage.claim_id not in claim_ids:
            raise ReportIntegrityError(f"evidence {passage.id} references unknown claim")
        evidence_ids.add(passage.id)
    seen_pairs: set[tuple[str, str]] = set()
    for judgment in report.judgments:
        if judgment.claim_id not in claim_ids:
            raise ReportIntegrityError("judgment references unknown claim")
        if judgment.evidence_id not in evidence_ids:
            raise ReportIntegrityError("judgment references unknown evidence")
        pair = (judgment.claim_id, judgment.evidence_id)
        if pair in seen_pairs:
            raise ReportIntegrityError(f"duplicate judgment for pair {pair}")
        seen_pairs.add(pair)
    from .scoring import sentence_judgment_counts  # local import: avoid cycle

    counts = sentence_judgment_counts(report)
    status_by_index = {s.index: s.status for s in report.sentences}
    for index, score in report.sentence_scores.items():
        if index not in sentence_indices:
            raise ReportIntegrityError(f"score for unknown sentence {index}")
        if not 0 <= score <= 1:
            raise ReportIntegrityError(f"sentence {index} score outside [0, 1]")
        support, total = counts.get(index, (0, 0))
        if status_by_index[index] is not SentenceStatus.VERIFIED or total < 1:
            raise ReportIntegrityError(f"sentence {index} scored without countable judgments")
        if score != Fraction(support, total):
            raise ReportIntegrityError(f"sentence {index} score disagrees with its judgments")
    for index, (support, total) in counts.items():
        if total >= 1 and status_by_index[index] is SentenceStatus.VERIFIED:
            if index not in report.sentence_scores:
                raise ReportIntegrityError(f"sentence {index} has judgments but no score")


_DIGIT_RUN = re.compile(r"(\d+)")


def natural_key(identifier: str) -> tuple:
    """Sort key treating digit runs numerically, so s2.c1 orders before s10.c1."""
    return tuple(int(part) if part.isdigit() else part for part in _DIGIT_RUN.split(identifier))


def _score_entry(frac: Fraction, support: int, total: int, threshold: Fraction) -> dict[str, Any]:
    return {
        "support": support,
        "total": total,
        "value": render_fraction(frac),
        "bucket": assign_bucket(frac).value,
        "classification": (
            Classification.NOT_FACTUAL if frac < threshold else Classification.FACTUAL
        ).value,
    }


def report_to_tree(report: CredibilityReport) -> dict[str, Any]:
    """Plain-JSON tree of the report in canonical order.

    Lists are sorted (sentences by index, claims and evidence by id, judgments
    by claim/evidence pair) so that equivalent reports produce identical trees.
    Score entries carry exact counts plus a fixed 4-decimal display value and
    the derived bucket/classification for UI consumption.
    """
    from .scoring import sentence_judgment_counts  # local import: avoid cycle

    counts = sentence_judgment_counts(report)
    scores_json: dict[str, Any] = {}
    for index in sorted(report.sentence_scores):
        support, total = counts.get(index, (0, 0))
        scores_json[str(index)] = _score_entry(
            report.sentence_scores[index], support, total, report.config.threshold_t
        )
    overall_json: dict[str, Any] | None = None
    if report.overall_score is not None:
        overall_json = {
            "num": report.overall_score.numerator,
            "den": report.overall_score.denominator,
            "value": render_fraction(report.overall_score),
            "bucket": assign_bucket(report.overall_score).value,
        }
    sentences_json = []
    for sentence in sorted(report.sentences, key=lambda s: s.index):
        entry: dict[str, Any] = {
            "index": sentence.index,
            "text": sentence.text,
            "status": sentence.status.value,
            "claims": [
                {
                    "id": claim.id,
                    "sentence_index": claim.sentence_index,
                    "text": claim.text,
                    "query": claim.query,
                }
                for claim in sorted(sentence.claims, key=lambda c: natural_key(c.id))
            ],
        }
        if sentence.error is not None:
            entry["error"] = sentence.error
        sentences_json.append(entry)
    evidence_json = []
    for passage in sorted(report.evidence, key=lambda e: natural_key(e.id)):
        evidence_json.append(
            {
                "id": passage.id,
                "claim_id": passage.claim_id,
                "url": passage.url,
                "hostname": passage.hostname,
                "category": passage.category.value,
                "match_sentence_index": passage.match_sentence_index,
                "window_start": passage.window_start,
                "window_end": passage.window_end,
                "text": passage.text,
                "relevance_score": format(passage.relevance_score, ".4f"),
                "snippet_fallback": passage.snippet_fallback,
            }
        )
    judgments_json = [
        {
            "claim_id": j.claim_id,
            "evidence_id": j.evidence_id,
            "verdict": j.verdict.value,
            "rationale": j.rationale,
        }
        for j in sorted(
            report.judgments, key=lambda j: (natural_key(j.claim_id), natural_key(j.evidence_id))
        )
    ]
    return {
        "job_id": report.job_id,
        "input_text": report.input_text,
        "config": report.config.to_dict(),
        "sentences": sentences_json,
        "evidence": evidence_json,
        "judgments": judgments_json,
        "sentence_scores": scores_json,
        "overall_score": overall_json,
    }


def canonical_json_bytes(tree: Any) -> bytes:
    return (
        json.dumps(tree, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"
    ).encode("utf-8")


def canonical_serialize(report: CredibilityReport) -> bytes:
    """Deterministic byte form of a report; equal reports share equal bytes."""
    return canonical_json_bytes(report_to_tree(report))


def deserialize_report(data: bytes | str) -> CredibilityReport:
    """Inverse of canonical_serialize; derived display fields are recomputed."""
    tree = json.loads(data)
    config = PipelineConfig.from_dict(tree["config"])
    sentences = []
    for entry in tree["sentences"]:
        claims = tuple(
            AtomicClaim(
                id=c["id"],
                sentence_index=c["sentence_index"],
                text=c["text"],
                query=c["query"],
            )
            for c in entry["claims"]
        )
        sentences.append(
            SentenceUnit(
                index=entry["index"],
                text=entry["text"],
                claims=claims,
                status=SentenceStatus(entry["status"]),
                error=entry.get("error"),
            )
        )
    evidence = tuple(
        EvidencePassage(
            id=e["id"],
            claim_id=e["claim_id"],
            url=e["url"],
            hostname=e["hostname"],
            category=SourceCategory(e["category"]),
            match_sentence_index=e["match_sentence_index"],
            window_start=e["window_start"],
            window_end=e["window_end"],
            text=e["text"],
            relevance_score=float(e["relevance_score"]),
            snippet_fallback=e.get("snippet_fallback", False),
        )
        for e in tree["evidence"]
    )
    judgments = tuple(
        Judgment(
            claim_id=j["claim_id"],
            evidence_id=j["evidence_id"],
            verdict=Verdict(j["verdict"]),
            rationale=j["rationale"],
        )
        for j in tree["judgments"]
    )
    sentence_scores = {
        int(index): Fraction(entry["support"], entry["total"])
        for index, entry in tree["sentence_scores"].items()
    }
    overall = tree.get("overall_score")
    overall_score = Fraction(overall["num"], overall["den"]) if overall else None
    report = CredibilityReport(
        job_id=tree["job_id"],
        input_text=tree["input_text"],
        sentences=tuple(sentences),
        evidence=evidence,
        judgments=judgments,
        sentence_scores=sentence_scores,
        overall_score=overall_score,
        config=config,
    )
    validate_report(report)
    return report
