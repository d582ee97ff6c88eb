"""Evidence retrieval: in-document sentence ranking and context windows.

Each claim's query is searched on the web; every surviving page becomes its
own retrieval corpus, ranked sentence by sentence with Okapi BM25 (sparse)
or cosine similarity over provider embeddings (dense).  The best matches are
widened to M sentences of context each side and merged when they overlap.
"""

from __future__ import annotations

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass

from .errors import (
    DomainError,
    EmptyDocument,
    FetchBlocked,
    FetchTimeout,
    ProviderError,
    ReplayMiss,
    TransportError,
)
from .extraction import CleanDocument, extract_content
from .model import AtomicClaim, EvidencePassage, PipelineConfig, RetrievalMode
from .sources import extract_hostname

log = logging.getLogger(__name__)

BM25_K1 = 1.2
BM25_B = 0.75

_WORD = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens split on non-alphanumeric boundaries."""
    return _WORD.findall(text.lower())


@dataclass(frozen=True)
class RankedMatch:
    sentence_index: int
    score: float


def rank_sentences_bm25(query: str, doc_sentences: list[str], k: int) -> list[RankedMatch]:
    """Okapi BM25 over one document's sentences, each sentence a "document".

    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)); corpus statistics come from
    this page alone.  Top-k by score with ties broken by lower index; all-zero
    scores still yield the first k indices.
    """
    if not doc_sentences:
        raise DomainError("ranking requires at least one sentence")
    docs = [tokenize(s) for s in doc_sentences]
    n_docs = len(docs)
    doc_freq: Counter[str] = Counter()
    for tokens in docs:
        doc_freq.update(set(tokens))
    idf = {
        term: math.log(1 + (n_docs - df + 0.5) / (df + 0.5))
        for term, df in doc_freq.items()
    }
    avgdl = sum(len(tokens) for tokens in docs) / n_docs
    query_tokens = tokenize(query)
    scores = []
    for tokens in docs:
        tf = Counter(tokens)
        length_norm = BM25_K1 * (1 - BM25_B + BM25_B * len(tokens) / avgdl) if avgdl > 0 else BM25_K1
        score = 0.0
        for term in query_tokens:
            freq = tf.get(term, 0)
            if freq == 0:
                continue
            score += idf[term] * freq * (BM25_K1 + 1) / (freq + length_norm)
        scores.append(score)
    order = sorted(range(n_docs), key=lambda i: (-scores[i], i))
    return [RankedMatch(i, scores[i]) for i in order[:k]]


def rank_sentences_dense(
    query: str, doc_sentences: list[str], k: int, embed
) -> list[RankedMatch]:
    """Cosine ranking via the embedding provider (vectors are unit-normalized,
    so cosine equals the dot product)."""
    if not doc_sentences:
        raise DomainError("ranking requires at least one sentence")
    vectors = embed([query] + list(doc_sentences))
    query_vec = vectors[0]
    scores = [
        sum(q * s for q, s in zip(query_vec, sentence_vec))
        for sentence_vec in vectors[1:]
    ]
    order = sorted(range(len(doc_sentences)), key=lambda i: (-scores[i], i))
    return [RankedMatch(i, scores[i]) for i in order[:k]]


def build_window(doc: CleanDocument, match_index: int, m: int) -> tuple[int, int, str]:
    """Context window of m sentences each side, clamped to the document."""
    if not 0 <= match_index < len(doc.sentences):
        raise DomainError(f"match index {match_index} out of range")
    if m < 0:
        raise DomainError("context size must be >= 0")
    start = max(0, match_index - m)
    end = min(len(doc.sentences) - 1, match_index + m)
    return start, end, " ".join(doc.sentences[start : end + 1])


@dataclass(frozen=True)
class _Window:
    start: int
    end: int
    match_index: int
    score: float


def _merge_windows(windows: list[_Window]) -> list[_Window]:
    """Merge overlapping windows, keeping the best match's score and index."""
    merged: list[_Window] = []
    for window in sorted(windows, key=lambda w: (w.start, w.end)):
        if merged and window.start <= merged[-1].end:
            prev = merged[-1]
            best = prev if prev.score >= window.score else window
            merged[-1] = _Window(
                start=prev.start,
                end=max(prev.end, window.end),
                match_index=best.match_index,
                score=best.score,
            )
        else:
            merged.append(window)
    return merged


def retrieve_evidence(
    claim: AtomicClaim,
    config: PipelineConfig,
    gateway,
    categorizer,
) -> list[EvidencePassage]:
    """Gather up to top_n evidence passages for one claim.

    Per-url failures degrade to a snippet fallback (when the search result
    carried one) or are skipped entirely; they never fail the claim.  An
    empty return marks the claim evidence-empty.
    """
    if not claim.query.strip():
        raise DomainError("claim query must be non-empty")
    results = gateway.search(claim.query, config.top_n_results)
    candidates: list[tuple[float, int, _Window, CleanDocument]] = []
    for rank, result in enumerate(results):
        doc = _load_document(result, gateway)
        if doc is None:
            continue
        try:
            if config.retrieval_mode is RetrievalMode.DENSE:
                matches = rank_sentences_dense(
                    claim.query, list(doc.sentences), config.top_k_passages, gateway.embed
                )
            else:
                matches = rank_sentences_bm25(
                    claim.query, list(doc.sentences), config.top_k_passages
                )
        except ProviderError as exc:
            log.warning("ranking failed for %s: %s", doc.url, exc)
            continue
        windows = []
        for match in matches:
            start, end, _ = build_window(doc, match.sentence_index, config.context_window_m)
            windows.append(_Window(start, end, match.sentence_index, match.score))
        for window in _merge_windows(windows):
            candidates.append((window.score, rank, window, doc))
    candidates.sort(key=lambda item: (-item[0], item[1], item[2].start))
    passages = []
    for ordinal, (score, _, window, doc) in enumerate(candidates[: config.top_n_results], start=1):
        hostname = extract_hostname(doc.url)
        passages.append(
            EvidencePassage(
                id=f"{claim.id}.e{ordinal}",
                claim_id=claim.id,
                url=doc.url,
                hostname=hostname,
                category=categorizer.categorize(hostname),
                match_sentence_index=window.match_index,
                window_start=window.start,
                window_end=window.end,
                text=" ".join(doc.sentences[window.start : window.end + 1]),
                relevance_score=round(score, 4),
                snippet_fallback=doc.snippet_fallback,
            )
        )
    if not passages:
        log.info("claim %s retrieved no usable evidence", claim.id)
    return passages


def _load_document(result, gateway) -> CleanDocument | None:
    try:
        body = gateway.fetch_page(result.url)
        return extract_content(body, result.url)
    except DomainError as exc:
        log.warning("unusable search result url %s: %s", result.url, exc)
        return None
    except (FetchBlocked, FetchTimeout, TransportError, ReplayMiss, EmptyDocument) as exc:
        log.warning("dropping %s: %s", result.url, exc)
        if result.snippet.strip():
            return CleanDocument(
                url=result.url,
                sentences=(result.snippet.strip(),),
                title=result.title,
                snippet_fallback=True,
            )
        return None
