import random

import pytest

from factlens.errors import DomainError, FetchBlocked
from factlens.extraction import CleanDocument
from factlens.model import AtomicClaim, PipelineConfig, SourceCategory
from factlens.providers import SearchResult
from factlens.retrieval import (
    _merge_windows,
    _Window,
    build_window,
    rank_sentences_bm25,
    rank_sentences_dense,
    retrieve_evidence,
    tokenize,
)
from support import bm25_oracle, random_corpus, replay_gateway


class TestBM25:
    def test_sole_term_match_ranks_first(self):
        sentences = [
            "Black coffee is popular.",
            "Java tea acts as a diuretic.",
            "The weather was mild.",
        ]
        ranked = rank_sentences_bm25("diuretic", sentences, 3)
        assert ranked[0].sentence_index == 1
        assert ranked[0].score > 0

    def test_absent_terms_fall_back_to_index_order(self):
        ranked = rank_sentences_bm25("zebra", ["One two.", "Three four.", "Five six."], 2)
        assert [m.sentence_index for m in ranked] == [0, 1]
        assert all(m.score == 0 for m in ranked)

    def test_toy_corpus_matches_oracle(self):
        sentences = [
            "Java tea is brewed from dried leaves.",
            "Tea ceremonies are common across the region.",
            "Java is also the name of an island.",
            "Coffee outsells tea in some markets.",
            "The leaves are dried in the sun.",
        ]
        engine = rank_sentences_bm25("java tea", sentences, len(sentences))
        expected = bm25_oracle("java tea", sentences)
        by_index = {m.sentence_index: m.score for m in engine}
        for i, oracle_score in enumerate(expected):
            assert abs(by_index[i] - oracle_score) <= 1e-9

    def test_random_corpora_match_oracle(self):
        rng = random.Random(42)
        for _ in range(25):
            query, sentences = random_corpus(rng)
            engine = rank_sentences_bm25(query, sentences, len(sentences))
            expected = bm25_oracle(query, sentences)
            for match in engine:
                assert abs(match.score - expected[match.sentence_index]) <= 1e-9

    def test_ties_break_by_lower_index(self):
        sentences = ["same words here.", "same words here.", "same words here."]
        ranked = rank_sentences_bm25("same words", sentences, 3)
        assert [m.sentence_index for m in ranked] == [0, 1, 2]

    def test_empty_corpus_rejected(self):
        with pytest.raises(DomainError):
            rank_sentences_bm25("q", [], 1)

    def test_tokenizer_contract(self):
        assert tokenize("Java-Tea, 2.0% (brew)!") == ["java", "tea", "2", "0", "brew"]


class TestDense:
    CORPUS = [
        "The museum reopened after a two-year renovation.",
        "Green tea contains caffeine.",
        "Local elections were held on Tuesday.",
        "The bridge spans nearly two kilometers.",
        "Chess engines evaluate millions of positions per second.",
    ]

    def test_identical_sentence_ranks_first_with_unit_similarity(self):
        gateway = replay_gateway("embeddings")
        ranked = rank_sentences_dense(
            "The bridge spans nearly two kilometers.", self.CORPUS, 2, gateway.embed
        )
        assert ranked[0].sentence_index == 3
        assert abs(ranked[0].score - 1.0) <= 1e-6

    def test_matches_cosine_oracle(self):
        gateway = replay_gateway("embeddings")
        query = "Green tea contains caffeine"
        vectors = gateway.embed([query] + self.CORPUS)
        sims = [
            sum(a * b for a, b in zip(vectors[0], v)) for v in vectors[1:]
        ]
        oracle_order = sorted(range(len(self.CORPUS)), key=lambda i: (-sims[i], i))
        ranked = rank_sentences_dense(query, self.CORPUS, len(self.CORPUS), gateway.embed)
        assert [m.sentence_index for m in ranked] == oracle_order
        for match in ranked:
            assert abs(match.score - sims[match.sentence_index]) <= 1e-9

    def test_k_larger_than_corpus_returns_all(self):
        gateway = replay_gateway("embeddings")
        ranked = rank_sentences_dense(
            "Green tea contains caffeine", self.CORPUS, 99, gateway.embed
        )
        assert len(ranked) == len(self.CORPUS)


class TestWindows:
    def test_middle_window(self):
        doc = CleanDocument(url="u", sentences=tuple(f"S{i}." for i in range(40)))
        assert build_window(doc, 20, 15)[:2] == (5, 35)

    def test_clamped_window(self):
        doc = CleanDocument(url="u", sentences=tuple(f"S{i}." for i in range(40)))
        assert build_window(doc, 3, 15)[:2] == (0, 18)

    def test_zero_context(self):
        doc = CleanDocument(url="u", sentences=("A.", "B.", "C."))
        start, end, text = build_window(doc, 1, 0)
        assert (start, end, text) == (1, 1, "B.")

    def test_window_text_is_verbatim_slice(self):
        doc = CleanDocument(url="u", sentences=("A.", "B.", "C.", "D."))
        _, _, text = build_window(doc, 1, 1)
        assert text == "A. B. C."

    def test_merge_overlapping_windows(self):
        merged = _merge_windows(
            [
                _Window(0, 25, 10, 2.0),
                _Window(0, 27, 12, 3.0),
            ]
        )
        assert len(merged) == 1
        assert (merged[0].start, merged[0].end) == (0, 27)
        assert merged[0].match_index == 12
        assert merged[0].score == 3.0

    def test_disjoint_windows_stay_separate(self):
        merged = _merge_windows([_Window(0, 3, 1, 1.0), _Window(5, 8, 6, 2.0)])
        assert len(merged) == 2


class _FakeCategorizer:
    def categorize(self, hostname):
        return SourceCategory.OTHER


class _FakeRetrievalGateway:
    """Search/fetch stub for unit-level retrieval behavior."""

    def __init__(self, results, pages, blocked=()):
        self.results = results
        self.pages = pages
        self.blocked = set(blocked)

    def search(self, query, top_n):
        return self.results[:top_n]

    def fetch_page(self, url):
        if url in self.blocked:
            raise FetchBlocked(f"{url} blocked")
        return self.pages[url]


def _claim() -> AtomicClaim:
    return AtomicClaim(id="s0.c1", sentence_index=0, text="the sky is blue", query="the sky is blue")


def _page(n: int) -> str:
    body = "".join(
        f"<p>Filler sentence number {i} talks about weather patterns.</p>" for i in range(n - 1)
    )
    return f"<html><body>{body}<p>Scientists say the sky is blue today.</p></body></html>"


class TestRetrieveEvidence:
    def test_golden_claim_yields_three_distinct_hostnames(self, golden_gateway):
        config = PipelineConfig()
        claim = AtomicClaim(
            id="s0.c1",
            sentence_index=0,
            text="Java tea is commonly used as a diuretic",
            query="Java tea is commonly used as a diuretic",
        )

        class _ReplayCategorizer:
            def categorize(self, hostname):
                from factlens.sources import SourceCategorizer

                return SourceCategorizer(golden_gateway).categorize(hostname)

        passages = retrieve_evidence(claim, config, golden_gateway, _ReplayCategorizer())
        assert len(passages) == 3
        assert len({p.hostname for p in passages}) == 3
        assert [p.id for p in passages] == ["s0.c1.e1", "s0.c1.e2", "s0.c1.e3"]
        for passage in passages:
            assert passage.window_start <= passage.match_sentence_index <= passage.window_end

    def test_all_fetches_blocked_is_evidence_empty(self):
        results = [
            SearchResult(f"https://h{i}.example.com/p", f"T{i}", "") for i in range(3)
        ]
        gateway = _FakeRetrievalGateway(results, {}, blocked=[r.url for r in results])
        passages = retrieve_evidence(_claim(), PipelineConfig(), gateway, _FakeCategorizer())
        assert passages == []

    def test_snippet_fallback_when_fetch_blocked(self):
        results = [
            SearchResult("https://h0.example.com/p", "T0", "The sky is blue in the snippet.")
        ]
        gateway = _FakeRetrievalGateway(results, {}, blocked=[results[0].url])
        passages = retrieve_evidence(_claim(), PipelineConfig(), gateway, _FakeCategorizer())
        assert len(passages) == 1
        assert passages[0].snippet_fallback is True
        assert passages[0].text == "The sky is blue in the snippet."

    def test_single_failure_does_not_drop_others(self):
        results = [
            SearchResult("https://h0.example.com/p", "T0", ""),
            SearchResult("https://h1.example.com/p", "T1", ""),
            SearchResult("https://h2.example.com/p", "T2", ""),
        ]
        pages = {r.url: _page(8) for r in results}
        gateway = _FakeRetrievalGateway(results, pages, blocked=["https://h1.example.com/p"])
        passages = retrieve_evidence(_claim(), PipelineConfig(), gateway, _FakeCategorizer())
        assert len(passages) == 2
        assert {p.hostname for p in passages} == {"h0.example.com", "h2.example.com"}

    def test_overlapping_matches_merge_into_single_passage(self):
        sentences = [f"<p>Filler line {i} covers meadow weather for farmers.</p>" for i in range(28)]
        sentences[10] = "<p>The sky is blue over the hills.</p>"
        sentences[12] = "<p>The sky is blue at noon.</p>"
        page = "<html><body>" + "".join(sentences) + "</body></html>"
        results = [SearchResult("https://h0.example.com/p", "T0", "")]
        gateway = _FakeRetrievalGateway(results, {results[0].url: page})
        config = PipelineConfig(top_k_passages=2, context_window_m=15)
        passages = retrieve_evidence(_claim(), config, gateway, _FakeCategorizer())
        assert len(passages) == 1
        assert passages[0].window_start == 0
        assert passages[0].window_end == 27

    def test_passage_text_is_verbatim_document_slice(self, golden_gateway):
        from factlens.extraction import extract_content

        claim = AtomicClaim(
            id="s0.c2",
            sentence_index=0,
            text="Java tea may increase urine production",
            query="Java tea may increase urine production",
        )
        passages = retrieve_evidence(claim, PipelineConfig(), golden_gateway, _FakeCategorizer())
        assert passages
        for passage in passages:
            doc = extract_content(golden_gateway.fetch_page(passage.url), passage.url)
            expected = " ".join(doc.sentences[passage.window_start : passage.window_end + 1])
            assert passage.text == expected
