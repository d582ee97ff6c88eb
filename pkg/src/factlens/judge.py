"""Chain-of-thought factuality judgment of one (claim, evidence) pair."""

from __future__ import annotations

import logging
import re

from .errors import DomainError, TransportError
from .model import AtomicClaim, EvidencePassage, Judgment, Verdict
from .prompts import load_template

log = logging.getLogger(__name__)

RATIONALE_MAX_CHARS = 2000

_VERDICT_LINE = re.compile(r"final\s+verdict\s*:?(.*)$", re.IGNORECASE)
_RATIONALE_LABEL = re.compile(r"rationale\s*:", re.IGNORECASE)
_FIRST_WORD = re.compile(r"[a-z]+")


def build_judgment_prompt(
    claim: AtomicClaim, evidence: EvidencePassage, paragraph_context: str
) -> list[dict[str, str]]:
    """Render the judgment prompt as a chat message sequence."""
    if not evidence.text.strip():
        raise DomainError("evidence text must be non-empty")
    content = load_template("factuality_judgment").format(
        context=paragraph_context,
        claim=claim.text,
        evidence=evidence.text,
    )
    return [{"role": "user", "content": content}]


def parse_verdict(llm_response: str) -> tuple[Verdict, str]:
    """Total parse of a judgment response into (verdict, rationale).

    The verdict comes from the LAST "Final Verdict" line (reasoning may
    restate the label mid-stream): a token starting with yes -> supported,
    no -> not_supported, irrelevant -> irrelevant.  A missing or
    unintelligible verdict maps to irrelevant with the response preserved
    as rationale.
    """
    verdict: Verdict | None = None
    verdict_line_start: int | None = None
    for line_match in reversed(list(re.finditer(r"[^\n]+", llm_response))):
        tail_match = _VERDICT_LINE.search(line_match.group(0))
        if tail_match is None:
            continue
        word = _FIRST_WORD.search(tail_match.group(1).lower())
        if word is not None:
            if word.group(0).startswith("yes"):
                verdict = Verdict.SUPPORTED
            elif word.group(0).startswith("no"):
                verdict = Verdict.NOT_SUPPORTED
            elif word.group(0).startswith("irrelevant"):
                verdict = Verdict.IRRELEVANT
        verdict_line_start = line_match.start()
        break
    rationale = llm_response.strip()
    labels = list(_RATIONALE_LABEL.finditer(llm_response))
    if labels:
        start = labels[-1].end()
        end = len(llm_response)
        if verdict_line_start is not None and verdict_line_start >= start:
            end = verdict_line_start
        rationale = llm_response[start:end].strip()
    if verdict is None:
        verdict = Verdict.IRRELEVANT
    if verdict is not Verdict.IRRELEVANT and not rationale:
        rationale = llm_response.strip() or "(no rationale given)"
    return verdict, rationale[:RATIONALE_MAX_CHARS]


def judge_claim_evidence(
    claim: AtomicClaim,
    evidence: EvidencePassage,
    paragraph_context: str,
    llm,
    profile: str,
) -> Judgment:
    """One provider call per pair; transport failure degrades to irrelevant."""
    messages = build_judgment_prompt(claim, evidence, paragraph_context)
    try:
        response = llm.chat_complete(profile, messages)
    except TransportError as exc:
        log.warning("judgment call failed for %s/%s: %s", claim.id, evidence.id, exc)
        return Judgment(
            claim_id=claim.id,
            evidence_id=evidence.id,
            verdict=Verdict.IRRELEVANT,
            rationale="provider-error",
        )
    verdict, rationale = parse_verdict(response)
    return Judgment(
        claim_id=claim.id,
        evidence_id=evidence.id,
        verdict=verdict,
        rationale=rationale,
    )
