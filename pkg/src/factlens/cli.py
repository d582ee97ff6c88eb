"""Command-line front end: verify one text, serve the API, run evaluations.

Exit codes: 0 success, 1 runtime/eval failure, 2 usage or precondition
failure (missing files, bad config, malformed dataset).
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click

from .errors import DomainError, EmptyInput, FactlensError, ProviderOutage, ReplayMiss
from .evaluation import load_dataset, parse_sweep, run_eval
from .figures import save_sentence_scores, save_sweep_f1
from .model import (
    CredibilityReport,
    PipelineConfig,
    assign_bucket,
    canonical_json_bytes,
    canonical_serialize,
    render_fraction,
)
from .pipeline import run_verification
from .providers import GatewayMode, ProviderGateway, ProviderSettings, ReplayStore
from .scoring import EMPTY_MASK, apply_selection
from .sources import CategoryStore, SourceCategorizer

log = logging.getLogger(__name__)


def _build_gateway(mode: str, fixtures: str | None, providers: str | None) -> ProviderGateway:
    settings = ProviderSettings.from_env(providers)
    gateway_mode = GatewayMode(mode)
    if gateway_mode is GatewayMode.LIVE:
        return ProviderGateway(settings, mode=gateway_mode)
    if fixtures is None:
        raise click.UsageError(f"--fixtures is required in {mode} mode")
    fixtures_path = Path(fixtures)
    if gateway_mode is GatewayMode.REPLAY and not fixtures_path.exists():
        raise click.UsageError(f"fixtures file not found: {fixtures}")
    return ProviderGateway(settings, mode=gateway_mode, store=ReplayStore(fixtures_path))


def _load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return PipelineConfig.from_dict(raw)
    except FileNotFoundError as exc:
        raise click.UsageError(f"config file not found: {path}") from exc
    except (json.JSONDecodeError, DomainError) as exc:
        raise click.UsageError(f"bad config file {path}: {exc}") from exc


def _categorizer(gateway: ProviderGateway, cache_path: str | None, profile: str) -> SourceCategorizer:
    store = CategoryStore(cache_path) if cache_path else CategoryStore()
    return SourceCategorizer(gateway, store=store, profile=profile)


def _summary_lines(report: CredibilityReport) -> list[str]:
    breakdown = apply_selection(report, EMPTY_MASK)
    lines = []
    if report.overall_score is not None:
        pooled = breakdown.pooled_score
        pooled_text = f" (pooled {render_fraction(pooled)})" if pooled is not None else ""
        lines.append(
            f"Document score: {render_fraction(report.overall_score)} "
            f"[{assign_bucket(report.overall_score).value}]{pooled_text}"
        )
    else:
        lines.append("Document score: n/a (no scored sentences)")
    evidence_by_id = {p.id: p for p in report.evidence}
    judgments_by_claim: dict[str, list] = {}
    for judgment in report.judgments:
        judgments_by_claim.setdefault(judgment.claim_id, []).append(judgment)
    for sentence in sorted(report.sentences, key=lambda s: s.index):
        score = report.sentence_scores.get(sentence.index)
        if score is not None:
            label = f"{render_fraction(score)} {assign_bucket(score).value}"
        else:
            label = sentence.status.value
        lines.append(f"S{sentence.index} [{label}] {sentence.text}")
        for claim in sentence.claims:
            judgments = judgments_by_claim.get(claim.id, [])
            suffix = "" if judgments else "  (no evidence)"
            lines.append(f"  - {claim.text}{suffix}")
            for judgment in judgments:
                passage = evidence_by_id[judgment.evidence_id]
                lines.append(
                    f"      [{judgment.verdict.value}] {passage.hostname} "
                    f"({passage.category.value}) {passage.url}"
                )
    return lines


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    """Fact verification with transparent, recomputable credibility scores."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(), help="Text file to verify.")
@click.option("--config", "config_path", type=click.Path(), help="Pipeline config JSON.")
@click.option("--mode", type=click.Choice(["live", "record", "replay"]), default="replay")
@click.option("--fixtures", type=click.Path(), help="Replay store (JSON-lines).")
@click.option("--output", default="-", help="Report path, or - for stdout.")
@click.option("--figure", type=click.Path(), help="Write a sentence-score chart here.")
@click.option("--category-cache", type=click.Path(), help="Persistent hostname category cache.")
@click.option("--providers", type=click.Path(), help="Provider settings JSON.")
def verify(input_path, config_path, mode, fixtures, output, figure, category_cache, providers):
    """Verify one text file and write its canonical credibility report."""
    in_file = Path(input_path)
    if not in_file.exists():
        raise click.UsageError(f"input file not found: {input_path}")
    text = in_file.read_text(encoding="utf-8")
    config = _load_config(config_path)
    gateway = _build_gateway(mode, fixtures, providers)
    try:
        report = run_verification(
            text, config, gateway,
            categorizer=_categorizer(gateway, category_cache, config.llm_profile),
        )
    except EmptyInput as exc:
        raise click.UsageError(str(exc)) from exc
    except ReplayMiss as exc:
        raise click.ClickException(f"replay miss ({exc.kind}): {exc.key}") from exc
    except (ProviderOutage, FactlensError) as exc:
        raise click.ClickException(str(exc)) from exc
    data = canonical_serialize(report)
    if output == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        summary_stream = sys.stderr
    else:
        Path(output).write_bytes(data)
        summary_stream = sys.stdout
    for line in _summary_lines(report):
        click.echo(line, file=summary_stream)
    if figure:
        save_sentence_scores(report, figure)
        click.echo(f"figure written to {figure}", file=summary_stream)


@main.command()
@click.option("--dataset", required=True, type=click.Path(), help="JSON-lines eval records.")
@click.option("--config", "config_path", type=click.Path(), help="Pipeline config JSON.")
@click.option("--mode", type=click.Choice(["live", "record", "replay"]), default="replay")
@click.option("--fixtures", type=click.Path(), help="Replay store (JSON-lines).")
@click.option("--out-dir", type=click.Path(), help="Write metrics.json/metrics.csv/figure here.")
@click.option("--sweep", multiple=True, help='Grid spec, e.g. "evidences=1,3 context=15,30".')
@click.option("--parallel", type=int, default=1, help="Record-level fan-out (default sequential).")
@click.option("--category-cache", type=click.Path())
@click.option("--providers", type=click.Path())
def eval(dataset, config_path, mode, fixtures, out_dir, sweep, parallel, category_cache, providers):
    """Run the evaluation harness and report binary F1 per setting."""
    dataset_path = Path(dataset)
    if not dataset_path.exists():
        raise click.UsageError(f"dataset file not found: {dataset}")
    try:
        records = load_dataset(dataset_path)
        sweep_points = parse_sweep(sweep) if sweep else None
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc
    config = _load_config(config_path)
    gateway = _build_gateway(mode, fixtures, providers)
    try:
        result = run_eval(
            records, config, gateway,
            sweep=sweep_points,
            categorizer=_categorizer(gateway, category_cache, config.llm_profile),
            parallel=parallel,
        )
    except ReplayMiss as exc:
        raise click.ClickException(f"replay miss ({exc.kind}): {exc.key}") from exc
    except FactlensError as exc:
        raise click.ClickException(str(exc)) from exc
    header = f"{'top_n':>5} {'ctxt_m':>6} {'subset':<12} {'P':>7} {'R':>7} {'F1':>7}"
    click.echo(header)
    click.echo("-" * len(header))
    for row in result.rows:
        for subset, metrics in sorted(row.subsets.items()):
            click.echo(
                f"{row.top_n_results:>5} {row.context_window_m:>6} {subset:<12} "
                f"{render_fraction(metrics.precision):>7} "
                f"{render_fraction(metrics.recall):>7} "
                f"{render_fraction(metrics.f1):>7}"
            )
    if result.skipped:
        click.echo(f"skipped {result.skipped} record(s) with label/sentence mismatches")
    if out_dir:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        (out_path / "metrics.json").write_bytes(canonical_json_bytes(result.to_tree()))
        _write_metrics_csv(result, out_path / "metrics.csv")
        save_sweep_f1(result, out_path / "f1_by_setting.png")
        click.echo(f"metrics and figure written to {out_path}")


def _write_metrics_csv(result, path: Path) -> None:
    import csv

    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "top_n_results", "context_window_m", "subset",
                "precision", "recall", "f1",
                "tp", "fp", "fn", "tn", "sentences", "records",
            ]
        )
        for row in result.rows:
            for subset, m in sorted(row.subsets.items()):
                writer.writerow(
                    [
                        row.top_n_results, row.context_window_m, subset,
                        render_fraction(m.precision), render_fraction(m.recall),
                        render_fraction(m.f1),
                        m.tp, m.fp, m.fn, m.tn, m.sentences, m.records,
                    ]
                )


@main.command()
@click.option("--port", type=int, default=lambda: int(os.environ.get("PORT", "8000")))
@click.option("--host", default="127.0.0.1")
@click.option("--data-dir", default="./factlens_data", type=click.Path())
@click.option("--mode", type=click.Choice(["live", "record", "replay"]), default="live")
@click.option("--fixtures", type=click.Path())
@click.option("--queue-cap", type=int, default=16)
@click.option("--cors-origin", multiple=True, help="Allowed UI origin(s); default any.")
@click.option("--ui-dir", type=click.Path(), help="Serve these static UI assets at /.")
@click.option("--providers", type=click.Path())
def serve(port, host, data_dir, mode, fixtures, queue_cap, cors_origin, ui_dir, providers):
    """Run the verification API service."""
    import uvicorn

    from .service import create_app

    gateway = _build_gateway(mode, fixtures, providers)
    app = create_app(
        data_dir=data_dir,
        gateway=gateway,
        queue_cap=queue_cap,
        cors_origins=tuple(cors_origin) or ("*",),
        ui_dir=ui_dir,
    )
    click.echo(f"serving on http://{host}:{port} (mode={mode})")
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
