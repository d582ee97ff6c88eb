"""Atomic claim generation: few-shot prompting plus strict response parsing.

Each sentence of the segmented input is sent to the chat provider with its
paragraph as context; the response is parsed into decontextualized claims
whose text doubles as the web search query.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .errors import DomainError, MalformedClaimResponse
from .model import AtomicClaim
from .prompts import load_template
from .segmentation import SegmentedText

log = logging.getLogger(__name__)

#: Response marker for sentences with nothing checkable (greetings, opinions).
NO_CLAIM_SENTINEL = "no factual claims"

_CLAIM_LINE = re.compile(r"^\s*(?:[-*•]\s*)?claim[\s_]*\d+\s*:\s*(.*?)\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class ClaimPrompt:
    """A rendered claim-generation request for one target sentence."""

    paragraph_context: str
    target_label: str
    target_text: str

    def render(self) -> list[dict[str, str]]:
        template = load_template("claim_generation")
        content = template.format(
            paragraph=self.paragraph_context,
            target_label=self.target_label,
            target_text=self.target_text,
        )
        return [{"role": "user", "content": content}]


def build_claim_prompt(segmented: SegmentedText, sentence_index: int) -> list[dict[str, str]]:
    """Render the claim prompt for one sentence as a chat message sequence."""
    if not 0 <= sentence_index < len(segmented.sentences):
        raise DomainError(f"sentence index {sentence_index} out of range")
    paragraph = segmented.paragraph_range(sentence_index)
    context = " ".join(
        f"S{local + 1}: {segmented.sentences[i].text}"
        for local, i in enumerate(paragraph)
    )
    local_index = sentence_index - paragraph.start
    prompt = ClaimPrompt(
        paragraph_context=context,
        target_label=f"S{local_index + 1}",
        target_text=segmented.sentences[sentence_index].text,
    )
    return prompt.render()


def parse_claims(llm_response: str) -> list[str]:
    """Extract claim bodies from "Claim_k:" lines, preserving order.

    Tolerates leading bullets and whitespace and is case-insensitive; empty
    bodies are dropped.  Raises MalformedClaimResponse when nothing matches.
    """
    claims = []
    for line in re.split(r"\r\n?|\n", llm_response):
        match = _CLAIM_LINE.match(line)
        if match and match.group(1):
            claims.append(match.group(1))
    if not claims:
        raise MalformedClaimResponse("no Claim_<k> lines found in response")
    return claims


def _is_sentinel(claim: str) -> bool:
    return claim.strip().strip(".()").strip().lower() == NO_CLAIM_SENTINEL


def generate_claims(segmented: SegmentedText, sentence_index: int, llm, profile: str) -> list[AtomicClaim]:
    """Generate AtomicClaims for one sentence via the chat provider.

    Retries once on a malformed response; two failures yield an empty list
    (the caller marks the sentence no_claims).  Transport errors propagate.
    """
    messages = build_claim_prompt(segmented, sentence_index)
    parsed: list[str] | None = None
    for attempt in range(2):
        response = llm.chat_complete(profile, messages)
        try:
            parsed = parse_claims(response)
            break
        except MalformedClaimResponse:
            if attempt == 0:
                log.warning("malformed claim response for sentence %d, retrying", sentence_index)
    if parsed is None:
        log.warning("sentence %d produced no parsable claims after retry", sentence_index)
        return []
    bodies = [claim for claim in parsed if not _is_sentinel(claim)]
    return [
        AtomicClaim(
            id=f"s{sentence_index}.c{k}",
            sentence_index=sentence_index,
            text=body,
            query=body,
        )
        for k, body in enumerate(bodies, start=1)
    ]
