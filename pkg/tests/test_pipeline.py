import json

import pytest

from factlens.errors import EmptyInput, FetchBlocked, IllegalTransition, ProviderOutage
from factlens.model import (
    PipelineConfig,
    RetrievalMode,
    SentenceStatus,
    Verdict,
    canonical_serialize,
    deserialize_report,
)
from factlens.pipeline import (
    JobEvent,
    JobState,
    VerificationJob,
    compute_job_id,
    job_transition,
    run_verification,
)
from support import JAVA_TEXT, replay_gateway


class TestGoldenRun:
    def test_replay_matches_committed_report(self, golden_gateway, golden_report_bytes):
        report = run_verification(JAVA_TEXT, PipelineConfig(), golden_gateway)
        assert canonical_serialize(report) == golden_report_bytes

    def test_two_runs_byte_identical(self, golden_report_bytes):
        first = run_verification(JAVA_TEXT, PipelineConfig(), replay_gateway("golden"))
        second = run_verification(JAVA_TEXT, PipelineConfig(), replay_gateway("golden"))
        assert canonical_serialize(first) == canonical_serialize(second) == golden_report_bytes

    def test_shape_and_judgment_cardinality(self, golden_gateway):
        report = run_verification(JAVA_TEXT, PipelineConfig(), golden_gateway)
        assert len(report.sentences) == 2
        claims = [c for s in report.sentences for c in s.claims]
        assert len(claims) == 5
        assert len(report.judgments) == 15
        by_claim = {}
        for passage in report.evidence:
            by_claim[passage.claim_id] = by_claim.get(passage.claim_id, 0) + 1
        assert len(report.judgments) == sum(by_claim.values())
        assert all(s.status is SentenceStatus.VERIFIED for s in report.sentences)
        verdicts = [j.verdict for j in report.judgments]
        assert verdicts.count(Verdict.NOT_SUPPORTED) == 1
        assert verdicts.count(Verdict.IRRELEVANT) == 4

    def test_zero_network_calls(self, golden_gateway):
        run_verification(JAVA_TEXT, PipelineConfig(), golden_gateway)
        assert golden_gateway.transport_calls == 0

    def test_deterministic_job_id_is_uuid_shaped(self):
        job_id = compute_job_id(JAVA_TEXT, PipelineConfig())
        parts = job_id.split("-")
        assert [len(p) for p in parts] == [8, 4, 4, 4, 12]
        assert job_id == compute_job_id(JAVA_TEXT, PipelineConfig())
        assert job_id != compute_job_id(JAVA_TEXT, PipelineConfig(top_n_results=1))


class TestDegradedRuns:
    def test_adversarial_sentence_unverified_but_job_succeeds(self):
        gateway = replay_gateway("adversarial")
        report = run_verification(JAVA_TEXT, PipelineConfig(), gateway)
        statuses = {s.index: s.status for s in report.sentences}
        assert statuses[0] is SentenceStatus.VERIFIED
        assert statuses[1] is SentenceStatus.UNVERIFIED
        assert 0 in report.sentence_scores
        assert 1 not in report.sentence_scores
        assert report.overall_score == report.sentence_scores[0]

    def test_greeting_is_no_claims(self):
        gateway = replay_gateway("greeting")
        report = run_verification("Hello!", PipelineConfig(), gateway)
        assert report.sentences[0].status is SentenceStatus.NO_CLAIMS
        assert report.judgments == ()
        assert report.overall_score is None

    def test_dense_mode_replay(self):
        gateway = replay_gateway("dense")
        config = PipelineConfig(retrieval_mode=RetrievalMode.DENSE)
        report = run_verification("Green tea contains caffeine.", config, gateway)
        assert report.sentence_scores
        assert gateway.transport_calls == 0

    def test_empty_text_rejected(self, golden_gateway):
        with pytest.raises(EmptyInput):
            run_verification("   ", PipelineConfig(), golden_gateway)

    def test_total_outage_fails_job(self):
        from factlens.errors import TransportError

        class DeadGateway:
            mode = "live"

            def chat_complete(self, profile, messages):
                raise TransportError("everything is down")

        with pytest.raises(ProviderOutage):
            run_verification("One. Two.", PipelineConfig(), DeadGateway())


class _InjectingGateway:
    """Delegates to a replay gateway but force-blocks one url."""

    def __init__(self, inner, blocked_url):
        self._inner = inner
        self._blocked = blocked_url
        self.mode = inner.mode

    def chat_complete(self, profile, messages):
        return self._inner.chat_complete(profile, messages)

    def embed(self, texts):
        return self._inner.embed(texts)

    def search(self, query, top_n):
        return self._inner.search(query, top_n)

    def fetch_page(self, url):
        if url == self._blocked:
            raise FetchBlocked(f"injected block for {url}")
        return self._inner.fetch_page(url)


class TestFaultIsolation:
    def test_blocking_one_url_shrinks_only_its_subtree(self, golden_report_bytes):
        baseline = json.loads(golden_report_bytes)
        base_counts = {
            index: entry["total"] for index, entry in baseline["sentence_scores"].items()
        }
        urls = [e["url"] for e in baseline["evidence"]]
        claim_of_url = {e["url"]: e["claim_id"] for e in baseline["evidence"]}
        for url in urls:
            gateway = _InjectingGateway(replay_gateway("golden"), url)
            report = run_verification(JAVA_TEXT, PipelineConfig(), gateway)
            tree = json.loads(canonical_serialize(report))
            affected_sentence = claim_of_url[url].split(".")[0][1:]
            for index, entry in tree["sentence_scores"].items():
                if index == affected_sentence:
                    assert entry["total"] == base_counts[index] - 1
                else:
                    assert entry["total"] == base_counts[index]
            untouched = [
                e for e in tree["evidence"] if e["claim_id"] != claim_of_url[url]
            ]
            baseline_untouched = [
                e for e in baseline["evidence"] if e["claim_id"] != claim_of_url[url]
            ]
            assert untouched == baseline_untouched


class TestJobTransitions:
    def test_start_moves_to_segmenting(self):
        job = VerificationJob(job_id="j")
        assert job_transition(job, JobEvent.START).state is JobState.SEGMENTING

    def test_done_cannot_restart(self):
        job = VerificationJob(job_id="j", state=JobState.DONE)
        with pytest.raises(IllegalTransition):
            job_transition(job, JobEvent.START)

    def test_unit_completions_accumulate(self):
        job = VerificationJob(job_id="j", state=JobState.JUDGING, total_units=15)
        for _ in range(7):
            job = job_transition(job, JobEvent.UNIT_COMPLETE)
        assert job.completed_units == 7
        assert job.total_units == 15

    def test_stage_order_is_monotone(self):
        job = job_transition(VerificationJob(job_id="j"), JobEvent.START)
        seen = [job.state]
        for _ in range(4):
            job = job_transition(job, JobEvent.ADVANCE)
            seen.append(job.state)
        assert seen == [
            JobState.SEGMENTING,
            JobState.GENERATING_CLAIMS,
            JobState.RETRIEVING,
            JobState.JUDGING,
            JobState.SCORING,
        ]
        with pytest.raises(IllegalTransition):
            job_transition(job, JobEvent.ADVANCE)

    def test_complete_requires_scoring_and_report(self, golden_report_bytes):
        report = deserialize_report(golden_report_bytes)
        job = VerificationJob(job_id="j", state=JobState.SCORING)
        done = job_transition(job, JobEvent.COMPLETE, report=report)
        assert done.state is JobState.DONE
        with pytest.raises(IllegalTransition):
            job_transition(
                VerificationJob(job_id="j", state=JobState.QUEUED),
                JobEvent.COMPLETE,
                report=report,
            )

    def test_fail_from_any_live_state(self):
        job = VerificationJob(job_id="j", state=JobState.RETRIEVING)
        failed = job_transition(job, JobEvent.FAIL, error="boom")
        assert failed.state is JobState.FAILED
        assert failed.error == "boom"


class TestRecordReplayEquivalence:
    def test_recorded_run_replays_byte_identically(self, tmp_path):
        from build_fixtures import java_backend
        from factlens.providers import GatewayMode, ProviderGateway, ReplayStore

        path = tmp_path / "live.jsonl"
        record = ProviderGateway(
            mode=GatewayMode.RECORD, store=ReplayStore(path), transport=java_backend()
        )
        live_report = run_verification(JAVA_TEXT, PipelineConfig(), record)
        replayed = ProviderGateway(mode=GatewayMode.REPLAY, store=ReplayStore(path))
        replay_report = run_verification(JAVA_TEXT, PipelineConfig(), replayed)
        assert canonical_serialize(live_report) == canonical_serialize(replay_report)
        assert replayed.transport_calls == 0

    def test_parallelism_does_not_change_bytes(self, golden_report_bytes):
        for parallelism in (1, 8):
            config = PipelineConfig(parallelism=parallelism)
            report = run_verification(JAVA_TEXT, config, replay_gateway("golden"))
            tree = json.loads(canonical_serialize(report))
            golden = json.loads(golden_report_bytes)
            assert tree["judgments"] == golden["judgments"]
            assert tree["sentence_scores"] == golden["sentence_scores"]
