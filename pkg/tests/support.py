"""Shared test helpers: independent oracles and random-report builders.

The oracles here are deliberately written from scratch (plain loops, no
imports from the modules they check) so engine bugs cannot hide in shared
code.
"""

from __future__ import annotations

import math
import random
import re
from fractions import Fraction
from pathlib import Path

from factlens.model import (
    AtomicClaim,
    CredibilityReport,
    EvidencePassage,
    Judgment,
    PipelineConfig,
    SentenceStatus,
    SentenceUnit,
    SourceCategory,
    Verdict,
)
from factlens.providers import GatewayMode, ProviderGateway, ReplayStore
from factlens.scoring import EMPTY_MASK, SelectionMask, apply_selection

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

JAVA_TEXT = (FIXTURES / "golden_input.txt").read_text(encoding="utf-8").rstrip("\n")


def replay_gateway(name: str) -> ProviderGateway:
    return ProviderGateway(
        mode=GatewayMode.REPLAY, store=ReplayStore(FIXTURES / f"{name}.jsonl")
    )


# -- BM25 oracle -------------------------------------------------------------


def bm25_oracle(query: str, sentences: list[str], k1: float = 1.2, b: float = 0.75) -> list[float]:
    """Brute-force Okapi scores, one per sentence, recomputed from scratch."""

    def words(text: str) -> list[str]:
        return re.findall(r"[a-z0-9]+", text.lower())

    docs = [words(s) for s in sentences]
    n = len(docs)
    avgdl = sum(len(d) for d in docs) / n
    scores = []
    for doc in docs:
        total = 0.0
        for term in words(query):
            tf = doc.count(term)
            if tf == 0:
                continue
            df = sum(1 for other in docs if term in other)
            idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
            if avgdl > 0:
                denom = tf + k1 * (1 - b + b * len(doc) / avgdl)
            else:
                denom = tf + k1
            total += idf * tf * (k1 + 1) / denom
        scores.append(total)
    return scores


_VOCAB = (
    "java tea leaf brew water health study river city green market code "
    "model data report year window glass stone north light paper sound"
).split()


def random_corpus(rng: random.Random) -> tuple[str, list[str]]:
    sentences = [
        " ".join(rng.choices(_VOCAB, k=rng.randint(1, 12))) + "."
        for _ in range(rng.randint(1, 20))
    ]
    query = " ".join(rng.choices(_VOCAB, k=rng.randint(1, 8)))
    return query, sentences


# -- recount oracle -----------------------------------------------------------


def naive_recount(report: CredibilityReport, mask: SelectionMask):
    """Recount verdicts straight off the judgment list, no scoring-module code."""
    evidence = {p.id: p for p in report.evidence}
    claim_to_sentence = {}
    for sentence in report.sentences:
        for claim in sentence.claims:
            claim_to_sentence[claim.id] = sentence.index
    per_sentence: dict[int, tuple[int, int]] = {}
    for judgment in report.judgments:
        passage = evidence[judgment.evidence_id]
        if passage.id in mask.excluded_evidence_ids:
            continue
        if passage.category in mask.excluded_categories:
            continue
        if judgment.verdict.value == "irrelevant" and not report.config.count_irrelevant_in_total:
            continue
        index = claim_to_sentence[judgment.claim_id]
        support, total = per_sentence.get(index, (0, 0))
        if judgment.verdict.value == "supported":
            support += 1
        per_sentence[index] = (support, total + 1)
    statuses = {s.index: s.status.value for s in report.sentences}
    scores = {
        index: Fraction(support, total)
        for index, (support, total) in per_sentence.items()
        if total > 0 and statuses[index] == "verified"
    }
    overall = (
        Fraction(sum(scores.values()), len(scores)) if scores else None
    )
    pooled_support = sum(
        s for i, (s, t) in per_sentence.items() if statuses[i] == "verified"
    )
    pooled_total = sum(
        t for i, (s, t) in per_sentence.items() if statuses[i] == "verified"
    )
    pooled = Fraction(pooled_support, pooled_total) if pooled_total else None
    return scores, overall, pooled


# -- random report builder ----------------------------------------------------

_CATEGORIES = list(SourceCategory)
_VERDICTS = list(Verdict)


def random_report(rng: random.Random, *, count_irrelevant: bool | None = None) -> CredibilityReport:
    """A structurally valid report with randomized tree shape and verdicts."""
    config = PipelineConfig(
        count_irrelevant_in_total=(
            rng.random() < 0.5 if count_irrelevant is None else count_irrelevant
        )
    )
    sentences = []
    evidence = []
    judgments = []
    n_sentences = rng.randint(1, 4)
    for index in range(n_sentences):
        n_claims = rng.randint(0, 3)
        claims = []
        sentence_has_judgment = False
        for c in range(1, n_claims + 1):
            claim = AtomicClaim(
                id=f"s{index}.c{c}",
                sentence_index=index,
                text=f"claim {index}.{c}",
                query=f"claim {index}.{c}",
            )
            claims.append(claim)
            for e in range(1, rng.randint(0, 3) + 1):
                passage = EvidencePassage(
                    id=f"{claim.id}.e{e}",
                    claim_id=claim.id,
                    url=f"https://host{rng.randint(0, 5)}.example.com/{index}/{c}/{e}",
                    hostname=f"host{rng.randint(0, 5)}.example.com",
                    category=rng.choice(_CATEGORIES),
                    match_sentence_index=2,
                    window_start=0,
                    window_end=4,
                    text=f"evidence text {claim.id}.{e}",
                    relevance_score=round(rng.uniform(0, 20), 4),
                )
                evidence.append(passage)
                verdict = rng.choice(_VERDICTS)
                judgments.append(
                    Judgment(
                        claim_id=claim.id,
                        evidence_id=passage.id,
                        verdict=verdict,
                        rationale="" if verdict is Verdict.IRRELEVANT else "because",
                    )
                )
                sentence_has_judgment = True
        if not claims:
            status = SentenceStatus.NO_CLAIMS
        elif not sentence_has_judgment:
            status = SentenceStatus.UNVERIFIED
        else:
            status = SentenceStatus.VERIFIED
        sentences.append(
            SentenceUnit(
                index=index,
                text=f"Sentence number {index} of the sample.",
                claims=tuple(claims),
                status=status,
            )
        )
    report = CredibilityReport(
        job_id="00000000-0000-0000-0000-000000000000",
        input_text=" ".join(s.text for s in sentences),
        sentences=tuple(sentences),
        evidence=tuple(evidence),
        judgments=tuple(judgments),
        config=config,
    )
    breakdown = apply_selection(report, EMPTY_MASK)
    return CredibilityReport(
        job_id=report.job_id,
        input_text=report.input_text,
        sentences=report.sentences,
        evidence=report.evidence,
        judgments=report.judgments,
        sentence_scores=breakdown.sentence_scores,
        overall_score=breakdown.overall_score,
        config=config,
    )


def random_mask(rng: random.Random, report: CredibilityReport) -> SelectionMask:
    ids = [p.id for p in report.evidence]
    excluded_ids = frozenset(i for i in ids if rng.random() < 0.3)
    excluded_categories = frozenset(c for c in _CATEGORIES if rng.random() < 0.2)
    return SelectionMask(
        excluded_evidence_ids=excluded_ids, excluded_categories=excluded_categories
    )
