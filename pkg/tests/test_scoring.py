import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from factlens.errors import DomainError, UnknownEvidenceId
from factlens.model import (
    Bucket,
    Classification,
    EvidencePassage,
    Judgment,
    PipelineConfig,
    SourceCategory,
    Verdict,
    assign_bucket,
    deserialize_report,
    render_fraction,
)
from factlens.scoring import (
    EMPTY_MASK,
    SelectionMask,
    apply_selection,
    classify_sentence,
    pooled_document_score,
    score_document,
    score_sentence,
)
from support import naive_recount, random_mask, random_report


def _judgments(verdicts):
    evidence = {}
    judgments = []
    for i, verdict in enumerate(verdicts, start=1):
        passage = EvidencePassage(
            id=f"s0.c1.e{i}",
            claim_id="s0.c1",
            url=f"https://h{i}.example.com/p",
            hostname=f"h{i}.example.com",
            category=SourceCategory.NEWS,
            match_sentence_index=0,
            window_start=0,
            window_end=0,
            text="t",
            relevance_score=1.0,
        )
        evidence[passage.id] = passage
        judgments.append(
            Judgment(
                claim_id="s0.c1",
                evidence_id=passage.id,
                verdict=verdict,
                rationale="" if verdict is Verdict.IRRELEVANT else "r",
            )
        )
    return judgments, evidence


class TestScoreSentence:
    def test_all_supported_is_one(self):
        judgments, evidence = _judgments([Verdict.SUPPORTED] * 3)
        score, counts = score_sentence(judgments, evidence, EMPTY_MASK, PipelineConfig())
        assert score == Fraction(1)
        assert counts == (3, 3)

    def test_one_of_three(self):
        judgments, evidence = _judgments(
            [Verdict.SUPPORTED, Verdict.NOT_SUPPORTED, Verdict.NOT_SUPPORTED]
        )
        score, counts = score_sentence(judgments, evidence, EMPTY_MASK, PipelineConfig())
        assert score == Fraction(1, 3)
        assert counts == (1, 3)

    def test_irrelevant_flag_semantics(self):
        judgments, evidence = _judgments([Verdict.SUPPORTED, Verdict.IRRELEVANT])
        counted, _ = score_sentence(judgments, evidence, EMPTY_MASK, PipelineConfig())
        assert counted == Fraction(1, 2)
        skipped, counts = score_sentence(
            judgments, evidence, EMPTY_MASK, PipelineConfig(count_irrelevant_in_total=False)
        )
        assert skipped == Fraction(1)
        assert counts == (1, 1)

    def test_zero_total_is_absent(self):
        judgments, evidence = _judgments([Verdict.IRRELEVANT])
        score, counts = score_sentence(
            judgments, evidence, EMPTY_MASK, PipelineConfig(count_irrelevant_in_total=False)
        )
        assert score is None
        assert counts == (0, 0)


class TestScoreDocument:
    def test_mean(self):
        scores = {0: Fraction(1), 1: Fraction(0), 2: Fraction(1, 2)}
        assert score_document(scores) == Fraction(1, 2)

    def test_absent_when_empty(self):
        assert score_document({}) is None
        assert pooled_document_score({}) is None

    def test_mean_vs_pooled_on_equal_totals(self):
        counts = {0: (2, 3), 1: (1, 3)}
        scores = {i: Fraction(s, t) for i, (s, t) in counts.items()}
        assert score_document(scores) == Fraction(1, 2)
        assert pooled_document_score(counts) == Fraction(1, 2)

    def test_mean_vs_pooled_divergence_enumeration(self):
        # Pooled weighs sentences by judgment count; mean does not.  Verify
        # both equal their brute-force definitions over a small enumeration.
        for s0 in range(3):
            for s1 in range(5):
                counts = {0: (s0, 2), 1: (s1, 4)}
                scores = {i: Fraction(s, t) for i, (s, t) in counts.items()}
                assert score_document(scores) == (Fraction(s0, 2) + Fraction(s1, 4)) / 2
                assert pooled_document_score(counts) == Fraction(s0 + s1, 6)


class TestClassify:
    def test_zero_is_not_factual(self):
        assert classify_sentence(Fraction(0), Fraction(3, 10)) is Classification.NOT_FACTUAL

    def test_third_is_factual_at_default_threshold(self):
        assert classify_sentence(Fraction(1, 3), Fraction(3, 10)) is Classification.FACTUAL

    def test_exact_boundary_is_factual(self):
        assert classify_sentence(Fraction(3, 10), Fraction(3, 10)) is Classification.FACTUAL

    @given(
        st.fractions(min_value=0, max_value=1),
        st.fractions(min_value=0, max_value=1),
    )
    def test_strict_inequality_everywhere(self, score, threshold):
        expected = Classification.NOT_FACTUAL if score < threshold else Classification.FACTUAL
        assert classify_sentence(score, threshold) is expected


class TestApplySelection:
    def test_empty_mask_is_identity(self, golden_report_bytes):
        report = deserialize_report(golden_report_bytes)
        breakdown = apply_selection(report, EMPTY_MASK)
        assert breakdown.sentence_scores == report.sentence_scores
        assert breakdown.overall_score == report.overall_score

    def test_excluding_not_supported_raises_score(self):
        judgments, evidence = _judgments(
            [Verdict.SUPPORTED, Verdict.NOT_SUPPORTED, Verdict.NOT_SUPPORTED]
        )
        mask = SelectionMask(excluded_evidence_ids=frozenset({"s0.c1.e2", "s0.c1.e3"}))
        score, counts = score_sentence(judgments, evidence, mask, PipelineConfig())
        assert score == Fraction(1)
        assert counts == (1, 1)

    def test_unknown_evidence_id_rejected(self, golden_report_bytes):
        report = deserialize_report(golden_report_bytes)
        with pytest.raises(UnknownEvidenceId):
            apply_selection(
                report, SelectionMask(excluded_evidence_ids=frozenset({"bogus.e1"}))
            )

    def test_golden_blog_exclusion_matches_recount(self, golden_report_bytes):
        report = deserialize_report(golden_report_bytes)
        mask = SelectionMask(excluded_categories=frozenset({SourceCategory.BLOG}))
        breakdown = apply_selection(report, mask)
        scores, overall, pooled = naive_recount(report, mask)
        assert breakdown.sentence_scores == scores
        assert breakdown.overall_score == overall
        assert breakdown.pooled_score == pooled
        blog_ids = {p.id for p in report.evidence if p.category is SourceCategory.BLOG}
        assert len(blog_ids) == 2

    def test_sentence_dropping_to_zero_becomes_unscored(self):
        rng = random.Random(4)
        report = random_report(rng, count_irrelevant=True)
        if not report.evidence:
            pytest.skip("random draw produced no evidence")
        mask = SelectionMask(excluded_evidence_ids=frozenset(p.id for p in report.evidence))
        breakdown = apply_selection(report, mask)
        assert breakdown.sentence_scores == {}
        assert breakdown.overall_score is None

    def test_recount_oracle_random(self):
        rng = random.Random(12345)
        for _ in range(100):
            report = random_report(rng)
            mask = random_mask(rng, report)
            breakdown = apply_selection(report, mask)
            scores, overall, pooled = naive_recount(report, mask)
            assert breakdown.sentence_scores == scores
            assert breakdown.overall_score == overall
            assert breakdown.pooled_score == pooled

    def test_mask_from_dict_validation(self):
        with pytest.raises(DomainError):
            SelectionMask.from_dict({"excluded_categories": ["purple"]})
        with pytest.raises(DomainError):
            SelectionMask.from_dict({"bogus_field": []})
        mask = SelectionMask.from_dict(
            {"excluded_evidence_ids": ["a"], "excluded_categories": ["blog"]}
        )
        assert mask.excluded_categories == frozenset({SourceCategory.BLOG})


class TestProperties:
    @given(st.lists(st.sampled_from(list(Verdict)), min_size=1, max_size=10))
    def test_scores_stay_in_unit_interval(self, verdicts):
        judgments, evidence = _judgments(verdicts)
        score, _ = score_sentence(judgments, evidence, EMPTY_MASK, PipelineConfig())
        if score is not None:
            assert 0 <= score <= 1

    @given(st.lists(st.sampled_from(list(Verdict)), min_size=1, max_size=8))
    def test_adding_supported_never_decreases(self, verdicts):
        config = PipelineConfig()
        judgments, evidence = _judgments(verdicts)
        base, _ = score_sentence(judgments, evidence, EMPTY_MASK, config)
        more_j, more_e = _judgments(verdicts + [Verdict.SUPPORTED])
        grown, _ = score_sentence(more_j, more_e, EMPTY_MASK, config)
        if base is not None:
            assert grown >= base

    @given(st.lists(st.sampled_from(list(Verdict)), min_size=1, max_size=8))
    def test_adding_not_supported_never_increases(self, verdicts):
        config = PipelineConfig()
        judgments, evidence = _judgments(verdicts)
        base, _ = score_sentence(judgments, evidence, EMPTY_MASK, config)
        more_j, more_e = _judgments(verdicts + [Verdict.NOT_SUPPORTED])
        shrunk, _ = score_sentence(more_j, more_e, EMPTY_MASK, config)
        if base is not None:
            assert shrunk <= base

    def test_exactness_one_third_renders_and_buckets(self):
        judgments, evidence = _judgments(
            [Verdict.SUPPORTED, Verdict.NOT_SUPPORTED, Verdict.NOT_SUPPORTED]
        )
        score, _ = score_sentence(judgments, evidence, EMPTY_MASK, PipelineConfig())
        assert render_fraction(score) == "0.3333"
        assert assign_bucket(score) is Bucket.MEDIUM
