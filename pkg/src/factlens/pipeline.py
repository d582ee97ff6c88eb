"""End-to-end verification pipeline: job lifecycle and report assembly.

Stages fan out over a bounded thread pool but results are assembled in
deterministic order (sentence index, claim ordinal, evidence rank), so a
replayed run produces byte-identical reports regardless of scheduling.
"""

from __future__ import annotations

import hashlib
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from .claims import generate_claims
from .errors import IllegalTransition, ProviderOutage, TransportError
from .judge import judge_claim_evidence
from .model import (
    AtomicClaim,
    CredibilityReport,
    EvidencePassage,
    Judgment,
    PipelineConfig,
    SentenceStatus,
    SentenceUnit,
    validate_report,
)
from .providers.replay import canonical_payload
from .retrieval import retrieve_evidence
from .scoring import EMPTY_MASK, apply_selection
from .segmentation import segment_text
from .sources import SourceCategorizer

log = logging.getLogger(__name__)


class JobState(str, Enum):
    QUEUED = "queued"
    SEGMENTING = "segmenting"
    GENERATING_CLAIMS = "generating_claims"
    RETRIEVING = "retrieving"
    JUDGING = "judging"
    SCORING = "scoring"
    DONE = "done"
    FAILED = "failed"


_STAGE_ORDER = [
    JobState.QUEUED,
    JobState.SEGMENTING,
    JobState.GENERATING_CLAIMS,
    JobState.RETRIEVING,
    JobState.JUDGING,
    JobState.SCORING,
    JobState.DONE,
]


class JobEvent(str, Enum):
    START = "start"
    ADVANCE = "advance"
    UNIT_COMPLETE = "unit_complete"
    ADD_UNITS = "add_units"
    COMPLETE = "complete"
    FAIL = "fail"


@dataclass(frozen=True)
class VerificationJob:
    job_id: str
    state: JobState = JobState.QUEUED
    created_at: float = 0.0
    updated_at: float = 0.0
    completed_units: int = 0
    total_units: int = 0
    report: CredibilityReport | None = None
    error: str | None = None


def compute_job_id(text: str, config: PipelineConfig) -> str:
    """Deterministic UUID-shaped id derived from the input and config.

    Identical submissions map to the same job, which both dedupes work and
    keeps replayed reports byte-identical across runs.
    """
    material = canonical_payload({"text": text, "config": config.to_dict()})
    digest = hashlib.sha256(material.encode("utf-8")).hexdigest()[:32]
    return f"{digest[:8]}-{digest[8:12]}-{digest[12:16]}-{digest[16:20]}-{digest[20:32]}"


def job_transition(
    job: VerificationJob, event: JobEvent, *, units: int = 1, report=None, error=None
) -> VerificationJob:
    """Monotone state machine step; illegal events raise IllegalTransition."""
    now = time.time()
    if job.state in (JobState.DONE, JobState.FAILED):
        raise IllegalTransition(f"job already {job.state.value}")
    if event is JobEvent.START:
        if job.state is not JobState.QUEUED:
            raise IllegalTransition(f"cannot start from {job.state.value}")
        return replace(job, state=JobState.SEGMENTING, updated_at=now)
    if event is JobEvent.ADVANCE:
        index = _STAGE_ORDER.index(job.state)
        if job.state is JobState.QUEUED or index + 1 >= len(_STAGE_ORDER) - 1:
            raise IllegalTransition(f"cannot advance from {job.state.value}")
        return replace(job, state=_STAGE_ORDER[index + 1], updated_at=now)
    if event is JobEvent.UNIT_COMPLETE:
        return replace(job, completed_units=job.completed_units + units, updated_at=now)
    if event is JobEvent.ADD_UNITS:
        return replace(job, total_units=job.total_units + units, updated_at=now)
    if event is JobEvent.COMPLETE:
        if job.state is not JobState.SCORING:
            raise IllegalTransition(f"cannot complete from {job.state.value}")
        if report is None:
            raise IllegalTransition("completion requires a report")
        return replace(job, state=JobState.DONE, report=report, updated_at=now)
    if event is JobEvent.FAIL:
        return replace(job, state=JobState.FAILED, error=str(error or "failed"), updated_at=now)
    raise IllegalTransition(f"unknown event {event}")


#: Observer callbacks: ("stage", JobState) | ("add_units", int) | ("unit_done", 1)
Observer = Callable[[str, object], None]


def _notify(observer: Observer | None, kind: str, value) -> None:
    if observer is not None:
        observer(kind, value)


def run_verification(
    text: str,
    config: PipelineConfig,
    gateway,
    *,
    categorizer: SourceCategorizer | None = None,
    observer: Observer | None = None,
) -> CredibilityReport:
    """Run the full pipeline and assemble a validated report.

    Per-unit failures degrade that unit only (no_claims, evidence-empty,
    irrelevant); the job itself fails only on empty input or a total
    provider outage during claim generation.
    """
    started = time.monotonic()
    text = text.rstrip()
    if categorizer is None:
        categorizer = SourceCategorizer(gateway, profile=config.llm_profile)
    _notify(observer, "stage", JobState.SEGMENTING)
    segmented = segment_text(text)
    sentences = list(segmented.sentences)
    _notify(observer, "add_units", len(sentences))

    _notify(observer, "stage", JobState.GENERATING_CLAIMS)
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:

        def claims_for(index: int):
            try:
                return generate_claims(segmented, index, gateway, config.llm_profile)
            except TransportError as exc:
                return exc

        claim_results = list(pool.map(claims_for, range(len(sentences))))
    transport_failures = sum(isinstance(r, TransportError) for r in claim_results)
    if sentences and transport_failures == len(sentences):
        raise ProviderOutage("claim generation failed for every sentence")
    for index, result in enumerate(claim_results):
        _notify(observer, "unit_done", 1)
        if isinstance(result, TransportError):
            sentences[index] = replace(
                sentences[index],
                status=SentenceStatus.UNVERIFIED,
                error=f"claim generation failed: {result}",
            )
        elif not result:
            sentences[index] = replace(sentences[index], status=SentenceStatus.NO_CLAIMS)
        else:
            sentences[index] = replace(
                sentences[index], claims=tuple(result), status=SentenceStatus.VERIFIED
            )

    all_claims: list[AtomicClaim] = [c for s in sentences for c in s.claims]
    _notify(observer, "stage", JobState.RETRIEVING)
    _notify(observer, "add_units", len(all_claims))
    evidence_by_claim: dict[str, list[EvidencePassage]] = {}
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:

        def evidence_for(claim: AtomicClaim):
            return retrieve_evidence(claim, config, gateway, categorizer)

        for claim, passages in zip(all_claims, pool.map(evidence_for, all_claims)):
            evidence_by_claim[claim.id] = passages
            _notify(observer, "unit_done", 1)

    pairs = [
        (claim, passage)
        for claim in all_claims
        for passage in evidence_by_claim[claim.id]
    ]
    _notify(observer, "stage", JobState.JUDGING)
    _notify(observer, "add_units", len(pairs))
    contexts = {
        sentence.index: segmented.paragraph_text(sentence.index) for sentence in sentences
    }
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:

        def judge(pair):
            claim, passage = pair
            return judge_claim_evidence(
                claim, passage, contexts[claim.sentence_index], gateway, config.llm_profile
            )

        judgments: list[Judgment] = []
        for judgment in pool.map(judge, pairs):
            judgments.append(judgment)
            _notify(observer, "unit_done", 1)

    _notify(observer, "stage", JobState.SCORING)
    judged_sentences = {claim.sentence_index for claim, _ in pairs}
    for index, sentence in enumerate(sentences):
        if sentence.status is SentenceStatus.VERIFIED and sentence.index not in judged_sentences:
            sentences[index] = replace(sentence, status=SentenceStatus.UNVERIFIED)

    report = CredibilityReport(
        job_id=compute_job_id(text, config),
        input_text=text,
        sentences=tuple(sentences),
        evidence=tuple(p for claim in all_claims for p in evidence_by_claim[claim.id]),
        judgments=tuple(judgments),
        config=config,
    )
    breakdown = apply_selection(report, EMPTY_MASK)
    report = replace(
        report,
        sentence_scores=breakdown.sentence_scores,
        overall_score=breakdown.overall_score,
    )
    validate_report(report)
    log.info(
        "verified %d sentences / %d claims / %d judgments in %.1fs",
        len(sentences),
        len(all_claims),
        len(judgments),
        time.monotonic() - started,
    )
    return report
