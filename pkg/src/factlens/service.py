"""HTTP JSON API: job submission, polling, and interactive recompute.

Jobs run asynchronously on a worker pool and are polled by id; finished
reports are persisted to an append-only JSON-lines journal so restarts keep
every completed job.  Recompute is pure over the stored report.
"""

from __future__ import annotations

import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from .errors import DomainError, UnknownEvidenceId
from .model import (
    PipelineConfig,
    canonical_json_bytes,
    canonical_serialize,
    deserialize_report,
)
from .pipeline import (
    JobEvent,
    JobState,
    VerificationJob,
    compute_job_id,
    job_transition,
    run_verification,
)
from .scoring import SelectionMask, apply_selection
from .sources import CategoryStore, SourceCategorizer

log = logging.getLogger(__name__)

TERMINAL_STATES = (JobState.DONE, JobState.FAILED)


class JobStore:
    """In-memory job map backed by an append-only journal of finished jobs."""

    def __init__(self, journal_path: Path):
        self._journal_path = journal_path
        self._lock = threading.Lock()
        self._jobs: dict[str, VerificationJob] = {}
        self._reports: dict[str, bytes] = {}
        if journal_path.exists():
            with journal_path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    self._restore(json.loads(line))

    def _restore(self, record: dict[str, Any]) -> None:
        job_id = record["job_id"]
        if record["state"] == JobState.DONE.value:
            report_bytes = record["report_json"].encode("utf-8")
            report = deserialize_report(report_bytes)
            self._jobs[job_id] = VerificationJob(
                job_id=job_id, state=JobState.DONE, report=report
            )
            self._reports[job_id] = canonical_serialize(report)
        else:
            self._jobs[job_id] = VerificationJob(
                job_id=job_id, state=JobState.FAILED, error=record.get("error", "failed")
            )

    def get(self, job_id: str) -> VerificationJob | None:
        with self._lock:
            return self._jobs.get(job_id)

    def report_bytes(self, job_id: str) -> bytes | None:
        with self._lock:
            return self._reports.get(job_id)

    def put(self, job: VerificationJob) -> None:
        with self._lock:
            self._jobs[job.job_id] = job

    def transition(self, job_id: str, event: JobEvent, **kwargs) -> VerificationJob:
        with self._lock:
            job = job_transition(self._jobs[job_id], event, **kwargs)
            self._jobs[job_id] = job
            return job

    def finalize(self, job: VerificationJob) -> None:
        """Record a terminal state durably before exposing it."""
        if job.state is JobState.DONE:
            assert job.report is not None
            payload = {
                "job_id": job.job_id,
                "state": JobState.DONE.value,
                "report_json": canonical_serialize(job.report).decode("utf-8").rstrip("\n"),
            }
        else:
            payload = {
                "job_id": job.job_id,
                "state": JobState.FAILED.value,
                "error": job.error or "failed",
            }
        with self._lock:
            with self._journal_path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(payload, ensure_ascii=False) + "\n")
                handle.flush()
            self._jobs[job.job_id] = job
            if job.report is not None:
                self._reports[job.job_id] = canonical_serialize(job.report)

    def active_count(self) -> int:
        with self._lock:
            return sum(1 for job in self._jobs.values() if job.state not in TERMINAL_STATES)


class _ConfigBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    llm_profile: str | None = None
    retrieval_mode: str | None = None
    top_n_results: int | None = None
    top_k_passages: int | None = None
    context_window_m: int | None = None
    threshold_t: float | str | None = None
    count_irrelevant_in_total: bool | None = None
    parallelism: int | None = None


class _JobBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    text: str
    config: _ConfigBody | None = None


class _MaskBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    excluded_evidence_ids: list[str] = []
    excluded_categories: list[str] = []


def create_app(
    *,
    data_dir: str | Path,
    gateway,
    config_defaults: PipelineConfig | None = None,
    queue_cap: int = 16,
    cors_origins: tuple[str, ...] = ("*",),
    job_workers: int = 2,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    data_path = Path(data_dir)
    data_path.mkdir(parents=True, exist_ok=True)
    store = JobStore(data_path / "jobs.jsonl")
    categorizer = SourceCategorizer(
        gateway, store=CategoryStore(data_path / "category_cache.json")
    )
    executor = ThreadPoolExecutor(max_workers=job_workers)
    defaults = config_defaults or PipelineConfig()

    app = FastAPI(title="factlens", openapi_url="/api/openapi", docs_url="/api/docs")
    app.state.store = store
    app.state.executor = executor
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    def _merge_config(body: _ConfigBody | None) -> PipelineConfig:
        merged = defaults.to_dict()
        if body is not None:
            merged.update({k: v for k, v in body.model_dump().items() if v is not None})
        return PipelineConfig.from_dict(merged)

    def _run_job(job_id: str, text: str, config: PipelineConfig) -> None:
        current_stage = JobState.QUEUED

        def observer(kind: str, value) -> None:
            nonlocal current_stage
            if kind == "stage":
                while current_stage is not value:
                    store.transition(job_id, JobEvent.ADVANCE)
                    current_stage = JobState(_next_stage(current_stage))
            elif kind == "add_units":
                store.transition(job_id, JobEvent.ADD_UNITS, units=int(value))
            elif kind == "unit_done":
                store.transition(job_id, JobEvent.UNIT_COMPLETE, units=int(value))

        try:
            store.transition(job_id, JobEvent.START)
            current_stage = JobState.SEGMENTING
            report = run_verification(
                text, config, gateway, categorizer=categorizer, observer=observer
            )
            job = job_transition(store.get(job_id), JobEvent.COMPLETE, report=report)
            store.finalize(job)
        except Exception as exc:  # noqa: BLE001 - job failures become job state
            log.exception("job %s failed", job_id)
            store.finalize(job_transition(store.get(job_id), JobEvent.FAIL, error=exc))

    @app.post("/api/jobs", status_code=202)
    def submit_job(body: _JobBody):
        text = body.text.rstrip()
        if not text:
            return JSONResponse(status_code=400, content={"error": "text is empty"})
        try:
            config = _merge_config(body.config)
        except DomainError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        job_id = compute_job_id(text, config)
        existing = store.get(job_id)
        if existing is not None and existing.state is not JobState.FAILED:
            return {"job_id": job_id}
        if store.active_count() >= queue_cap:
            return JSONResponse(status_code=429, content={"error": "job queue is full"})
        store.put(VerificationJob(job_id=job_id))
        executor.submit(_run_job, job_id, text, config)
        return {"job_id": job_id}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        job = store.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": "unknown job id"})
        if job.state is JobState.DONE:
            return Response(content=store.report_bytes(job_id), media_type="application/json")
        if job.state is JobState.FAILED:
            return {"state": job.state.value, "error": job.error}
        return {
            "state": job.state.value,
            "progress": {
                "completed_units": job.completed_units,
                "total_units": job.total_units,
            },
        }

    @app.post("/api/jobs/{job_id}/recompute")
    def recompute(job_id: str, body: _MaskBody):
        job = store.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": "unknown job id"})
        if job.state is not JobState.DONE:
            return JSONResponse(status_code=409, content={"error": "job is not done"})
        try:
            mask = SelectionMask.from_dict(body.model_dump())
            breakdown = apply_selection(job.report, mask)
        except (UnknownEvidenceId, DomainError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return Response(
            content=canonical_json_bytes(breakdown.to_tree()), media_type="application/json"
        )

    @app.get("/api/health")
    def health():
        return {"status": "ok", "mode": gateway.mode.value}

    @app.get("/api/defaults")
    def config_defaults_route():
        return defaults.to_dict()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _next_stage(state: JobState) -> str:
    order = [
        JobState.QUEUED,
        JobState.SEGMENTING,
        JobState.GENERATING_CLAIMS,
        JobState.RETRIEVING,
        JobState.JUDGING,
        JobState.SCORING,
    ]
    return order[order.index(state) + 1].value
