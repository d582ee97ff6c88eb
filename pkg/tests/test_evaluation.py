import json
import random
from fractions import Fraction

import pytest

from factlens.errors import DomainError
from factlens.evaluation import (
    EvalRecord,
    compute_binary_f1,
    load_dataset,
    parse_sweep,
    predict_sentence_labels,
    run_eval,
    sentence_labels_from_spans,
)
from factlens.model import PipelineConfig, canonical_json_bytes, deserialize_report
from support import FIXTURES, replay_gateway


class TestComputeBinaryF1:
    def test_perfect_predictions(self):
        p, r, f1 = compute_binary_f1([1, 0, 1], [1, 0, 1])
        assert (p, r, f1) == (1, 1, 1)

    def test_no_positives_anywhere_is_zero_by_convention(self):
        assert compute_binary_f1([0, 0], [0, 0]) == (0, 0, 0)

    def test_hand_case_tp1_fp1_fn0(self):
        p, r, f1 = compute_binary_f1([1, 1], [1, 0])
        assert p == Fraction(1, 2)
        assert r == 1
        assert abs(float(f1) - 0.6667) <= 0.00005

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            compute_binary_f1([1], [1, 0])

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            compute_binary_f1([], [])

    def test_confusion_matrix_oracle_random(self):
        rng = random.Random(7)
        for _ in range(200):
            n = rng.randint(1, 30)
            predictions = [rng.randint(0, 1) for _ in range(n)]
            gold = [rng.randint(0, 1) for _ in range(n)]
            p, r, f1 = compute_binary_f1(predictions, gold)
            tp = sum(a and b for a, b in zip(predictions, gold))
            fp = sum(a and not b for a, b in zip(predictions, gold))
            fn = sum(b and not a for a, b in zip(predictions, gold))
            assert p == (Fraction(tp, tp + fp) if tp + fp else 0)
            assert r == (Fraction(tp, tp + fn) if tp + fn else 0)
            if p + r:
                assert f1 == 2 * p * r / (p + r)
            else:
                assert f1 == 0


class TestPredictLabels:
    def test_threshold_rule_on_golden(self, golden_report_bytes):
        report = deserialize_report(golden_report_bytes)
        assert predict_sentence_labels(report) == [0, 0]

    def test_unscored_sentences_predict_factual(self):
        gateway = replay_gateway("greeting")
        from factlens.pipeline import run_verification

        report = run_verification("Hello!", PipelineConfig(), gateway)
        assert predict_sentence_labels(report) == [0]


class TestSpanConverter:
    TEXT = "The tower was built in 1880. It is in Paris. Many visit it."

    def test_overlapping_span_labels_its_sentence(self):
        start = self.TEXT.index("1880")
        labels = sentence_labels_from_spans(self.TEXT, [(start, start + 4)])
        assert labels == [1, 0, 0]

    def test_span_across_two_sentences_labels_both(self):
        start = self.TEXT.index("Paris")
        end = self.TEXT.index("visit")
        labels = sentence_labels_from_spans(self.TEXT, [(start, end)])
        assert labels == [0, 1, 1]

    def test_no_spans_is_all_zero(self):
        assert sentence_labels_from_spans(self.TEXT, []) == [0, 0, 0]

    def test_out_of_range_span_rejected(self):
        with pytest.raises(DomainError):
            sentence_labels_from_spans(self.TEXT, [(0, 10_000)])


class TestLoadDataset:
    def test_bundled_dataset(self):
        records = load_dataset(FIXTURES / "eval_dataset.jsonl")
        assert len(records) == 6
        assert {r.subset for r in records} == {"alpha", "beta"}

    def test_empty_dataset_is_error(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        with pytest.raises(DomainError):
            load_dataset(empty)

    def test_malformed_record_is_error(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"id": "x", "text": "y."}\n', encoding="utf-8")
        with pytest.raises(DomainError):
            load_dataset(bad)

    def test_labels_restricted_to_binary(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(
            '{"id": "x", "text": "y.", "gold_sentence_labels": [2]}\n', encoding="utf-8"
        )
        with pytest.raises(DomainError):
            load_dataset(bad)


class TestParseSweep:
    def test_single_spec_string(self):
        assert parse_sweep(["evidences=1,3 context=15,30"]) == [
            (1, 15), (1, 30), (3, 15), (3, 30),
        ]

    def test_multiple_flags(self):
        assert parse_sweep(["evidences=1,3", "context=15,30"]) == [
            (1, 15), (1, 30), (3, 15), (3, 30),
        ]

    @pytest.mark.parametrize(
        "spec", ["evidences=1,3", "bogus=1", "evidences=a context=15", ""]
    )
    def test_bad_specs(self, spec):
        with pytest.raises(DomainError):
            parse_sweep([spec])


class TestRunEval:
    def test_sweep_matches_golden_metrics(self):
        records = load_dataset(FIXTURES / "eval_dataset.jsonl")
        gateway = replay_gateway("eval")
        result = run_eval(
            records,
            PipelineConfig(),
            gateway,
            sweep=[(1, 15), (1, 30), (3, 15), (3, 30)],
        )
        assert canonical_json_bytes(result.to_tree()) == (
            FIXTURES / "golden_metrics.json"
        ).read_bytes()
        assert len(result.rows) == 4
        assert gateway.transport_calls == 0

    def test_parallel_records_match_sequential(self):
        records = load_dataset(FIXTURES / "eval_dataset.jsonl")
        sequential = run_eval(records, PipelineConfig(), replay_gateway("eval"))
        fanned_out = run_eval(
            records, PipelineConfig(), replay_gateway("eval"), parallel=4
        )
        assert sequential.to_tree() == fanned_out.to_tree()

    def test_sweep_rows_independent_of_order(self):
        records = load_dataset(FIXTURES / "eval_dataset.jsonl")
        forward = run_eval(
            records, PipelineConfig(), replay_gateway("eval"), sweep=[(1, 15), (3, 30)]
        )
        backward = run_eval(
            records, PipelineConfig(), replay_gateway("eval"), sweep=[(3, 30), (1, 15)]
        )
        by_point_f = {(r.top_n_results, r.context_window_m): r.to_tree() for r in forward.rows}
        by_point_b = {(r.top_n_results, r.context_window_m): r.to_tree() for r in backward.rows}
        assert by_point_f == by_point_b

    def test_label_mismatch_skips_record(self):
        records = [
            EvalRecord(id="good", text="Hello!", gold_sentence_labels=(0,)),
            EvalRecord(id="bad", text="Hello!", gold_sentence_labels=(0, 1)),
        ]
        result = run_eval(records, PipelineConfig(), replay_gateway("greeting"))
        assert result.records == 1
        assert result.skipped == 1

    def test_all_records_skipped_is_error(self):
        records = [EvalRecord(id="bad", text="Hello!", gold_sentence_labels=(0, 1))]
        with pytest.raises(DomainError):
            run_eval(records, PipelineConfig(), replay_gateway("greeting"))

    def test_metrics_tree_shape(self):
        tree = json.loads((FIXTURES / "golden_metrics.json").read_bytes())
        assert tree["records"] == 6
        assert len(tree["rows"]) == 4
        for row in tree["rows"]:
            assert set(row["subsets"]) == {"alpha", "beta", "overall"}
            for metrics in row["subsets"].values():
                assert set(metrics) >= {"precision", "recall", "f1", "tp", "fp", "fn", "tn"}
