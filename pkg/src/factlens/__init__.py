"""Fact verification with transparent, recomputable credibility scores."""

from .model import (
    AtomicClaim,
    Bucket,
    Classification,
    CredibilityReport,
    EvidencePassage,
    Judgment,
    PipelineConfig,
    SentenceStatus,
    SentenceUnit,
    SourceCategory,
    Verdict,
    assign_bucket,
    canonical_serialize,
    deserialize_report,
    validate_report,
)
from .pipeline import JobEvent, JobState, VerificationJob, job_transition, run_verification
from .scoring import SelectionMask, apply_selection

__version__ = "0.1.0"

__all__ = [
    "AtomicClaim",
    "Bucket",
    "Classification",
    "CredibilityReport",
    "EvidencePassage",
    "JobEvent",
    "JobState",
    "Judgment",
    "PipelineConfig",
    "SelectionMask",
    "SentenceStatus",
    "SentenceUnit",
    "SourceCategory",
    "Verdict",
    "VerificationJob",
    "apply_selection",
    "assign_bucket",
    "canonical_serialize",
    "deserialize_report",
    "job_transition",
    "run_verification",
    "validate_report",
]
