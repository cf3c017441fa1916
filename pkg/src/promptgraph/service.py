"""HTTP service exposing sessions, generation, and graph builds.

All routes live under /api/v1. Graph documents are cached per (session
version, params) and serialized once, so identical requests over an
unchanged session return byte-identical bodies. Generation runs on a
per-session FIFO worker so step order stays well-defined; a failed
generation is recorded as a failed step and never corrupts the session.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import GROUPING_MODES, BuildParams, ServiceConfig
from .diffing import diff_prompts
from .embedding import EmbeddingCache, HttpEmbeddingProvider, StubEmbeddingProvider
from .generation import (
    GenerationError,
    GenerationRequest,
    HttpTxt2ImgBackend,
    StubImageBackend,
)
from .layout import InvalidOverride, StageOverride, segment_stages, with_override
from .pipeline import build_layout_document, parse_session_prompts
from .prompts import jaccard_similarity
from .store import GenerationParams, SessionStore, UnknownSession

API_PREFIX = "/api/v1"


class CreateSessionBody(BaseModel):
    title: str = ""


class GenerateBody(BaseModel):
    prompt: str
    n: int = 1
    seed: int = 0
    width: int = 512
    height: int = 512


class StagePatchBody(BaseModel):
    op: str
    step: Optional[int] = None
    boundary: Optional[int] = None


@dataclass
class Job:
    id: str
    session_id: str
    status: str = "pending"  # pending | completed | failed
    step: dict | None = None
    error: str | None = None


@dataclass
class _SessionWorker:
    queue: "queue.Queue[tuple[Job, GenerateBody]]" = field(default_factory=queue.Queue)
    thread: threading.Thread | None = None


class ServiceState:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = SessionStore(config.data_dir)
        if config.backend_mode == "real":
            self.backend = HttpTxt2ImgBackend(
                config.backend_url, config.backend_timeout, config.max_batch
            )
        else:
            self.backend = StubImageBackend(config.max_batch)
        if config.embed_mode == "real":
            self.embedder = HttpEmbeddingProvider(config.embed_url, config.embed_timeout)
        else:
            self.embedder = StubEmbeddingProvider()
        self.embed_fallback = (
            StubEmbeddingProvider() if config.embed_fallback_stub else None
        )
        self.embed_cache = EmbeddingCache()
        self.doc_cache: dict[tuple, str] = {}
        self.position_memory: dict[str, dict] = {}  # incremental mode only
        self.jobs: dict[str, Job] = {}
        self.workers: dict[str, _SessionWorker] = {}
        self.lock = threading.Lock()
        self.build_lock = threading.Lock()
        self._job_counter = 0

    # -- generation queue ---------------------------------------------------

    def submit(self, session_id: str, body: GenerateBody) -> Job:
        with self.lock:
            self._job_counter += 1
            job = Job(id=f"job-{self._job_counter}", session_id=session_id)
            self.jobs[job.id] = job
            worker = self.workers.setdefault(session_id, _SessionWorker())
            worker.queue.put((job, body))
            if worker.thread is None or not worker.thread.is_alive():
                worker.thread = threading.Thread(
                    target=self._drain, args=(session_id,), daemon=True
                )
                worker.thread.start()
        return job

    def _drain(self, session_id: str) -> None:
        worker = self.workers[session_id]
        while True:
            try:
                job, body = worker.queue.get(timeout=0.5)
            except queue.Empty:
                return
            self._run_job(job, body)

    def _run_job(self, job: Job, body: GenerateBody) -> None:
        request = GenerationRequest(
            prompt=body.prompt, n=body.n, seed=body.seed, width=body.width, height=body.height
        )
        params = GenerationParams(
            seed=body.seed,
            batch_size=body.n,
            width=body.width,
            height=body.height,
            model=self.config.backend_mode,
        )
        try:
            images = self.backend.generate(request)
            record = self.store.append_step(job.session_id, body.prompt, params, images)
            job.step = _step_doc(record, job.session_id)
            job.status = "completed"
        except (GenerationError, ValueError) as exc:
            record = self.store.append_step(
                job.session_id, body.prompt, params, [], status="failed"
            )
            job.step = _step_doc(record, job.session_id)
            job.status = "failed"
            job.error = str(exc)
        self.invalidate(job.session_id)

    def invalidate(self, session_id: str) -> None:
        with self.lock:
            stale = [k for k in self.doc_cache if k[0] == session_id]
            for k in stale:
                del self.doc_cache[k]

    # -- cached builds --------------------------------------------------------

    def graph_json(self, session_id: str, params: BuildParams) -> str:
        snapshot = self.store.snapshot(session_id)
        key = (session_id, snapshot.version, params.cache_key())
        with self.lock:
            cached = self.doc_cache.get(key)
        if cached is not None:
            return cached
        memory = None
        if self.config.incremental_layout:
            memory = self.position_memory.setdefault(session_id, {})
        with self.build_lock:  # memory updates must not interleave
            doc = build_layout_document(
                snapshot,
                params,
                provider=self.embedder,
                cache=self.embed_cache,
                fallback=self.embed_fallback,
                position_memory=memory,
            )
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        with self.lock:
            if len(self.doc_cache) > 64:
                self.doc_cache.clear()
            self.doc_cache[key] = text
        return text


def _step_doc(record, session_id: str) -> dict:
    return {
        "id": record.id,
        "session_id": session_id,
        "order": record.order,
        "prompt": record.prompt,
        "params": record.params.to_dict(),
        "image_ids": list(record.image_ids),
        "image_urls": [
            f"{API_PREFIX}/sessions/{session_id}/assets/{a}.png" for a in record.image_ids
        ],
        "created_at": record.created_at,
        "status": record.status,
    }


def _session_doc(session) -> dict:
    return {
        "id": session.id,
        "title": session.title,
        "created_at": session.created_at,
        "step_count": session.step_count,
    }


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    state = ServiceState(config)
    app = FastAPI(title="promptgraph", version="0.1.0")
    app.state.service = state

    def _session_or_404(session_id: str):
        try:
            return state.store.get_session(session_id)
        except UnknownSession:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")

    @app.get(f"{API_PREFIX}/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post(f"{API_PREFIX}/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        return _session_doc(state.store.create_session(body.title))

    @app.get(f"{API_PREFIX}/sessions")
    def list_sessions() -> list[dict]:
        return [_session_doc(s) for s in state.store.list_sessions()]

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}")
    def get_session(session_id: str) -> dict:
        return _session_doc(_session_or_404(session_id))

    @app.post(f"{API_PREFIX}/sessions/{{session_id}}/generate", status_code=202)
    def generate(session_id: str, body: GenerateBody) -> dict:
        _session_or_404(session_id)
        if body.n < 1 or body.n > config.max_batch:
            raise HTTPException(status_code=422, detail="batch size out of range")
        job = state.submit(session_id, body)
        return {"job_id": job.id, "status": job.status}

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}/jobs/{{job_id}}")
    def job_status(session_id: str, job_id: str) -> dict:
        _session_or_404(session_id)
        job = state.jobs.get(job_id)
        if job is None or job.session_id != session_id:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
        return {"job_id": job.id, "status": job.status, "step": job.step, "error": job.error}

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}/history")
    def history(
        session_id: str,
        s_min: float = Query(default=0.6, ge=0.0, le=1.0),
    ) -> dict:
        _session_or_404(session_id)
        snapshot = state.store.snapshot(session_id)
        steps = sorted(snapshot.steps, key=lambda s: s.order)
        tokens = parse_session_prompts(steps)
        transitions = []
        for i in range(len(steps) - 1):
            sim = jaccard_similarity(tokens[i], tokens[i + 1])
            entry = {
                "src_step": steps[i].id,
                "tgt_step": steps[i + 1].id,
                "similarity": sim,
                "similar": sim >= s_min,
                "ops": None,
            }
            if sim >= s_min:
                diff = diff_prompts(tokens[i], tokens[i + 1], steps[i].id, steps[i + 1].id)
                entry["ops"] = [
                    {
                        "word": op.word,
                        "action": op.action,
                        "weight_before": op.weight_before,
                        "weight_after": op.weight_after,
                    }
                    for op in diff.ops
                ]
            transitions.append(entry)
        return {
            "session": _session_doc(snapshot.session),
            "steps": [_step_doc(s, session_id) for s in steps],
            "transitions": transitions,
            "s_min": s_min,
        }

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}/graph")
    def graph(
        session_id: str,
        alpha: float = Query(default=0.5, ge=0.0, le=1.0),
        s_min: float = Query(default=0.6, ge=0.0, le=1.0),
        w_min: Optional[float] = Query(default=None, ge=0.0),
        cluster_distance: float = Query(default=0.7, gt=0.0),
        grouping_mode: str = Query(default="cluster"),
    ) -> Response:
        _session_or_404(session_id)
        if grouping_mode not in GROUPING_MODES:
            raise HTTPException(status_code=422, detail="unknown grouping_mode")
        params = BuildParams(
            alpha=alpha,
            s_min=s_min,
            w_min=w_min,
            cluster_distance=cluster_distance,
            grouping_mode=grouping_mode,
            seed=config.seed,
        )
        return Response(
            content=state.graph_json(session_id, params), media_type="application/json"
        )

    @app.patch(f"{API_PREFIX}/sessions/{{session_id}}/stages")
    def patch_stages(
        session_id: str,
        body: StagePatchBody,
        s_min: float = Query(default=0.6, ge=0.0, le=1.0),
    ) -> dict:
        _session_or_404(session_id)
        if body.op == "split":
            at = body.step
        elif body.op == "merge":
            at = body.boundary
        else:
            raise HTTPException(status_code=422, detail="op must be 'split' or 'merge'")
        if at is None:
            raise HTTPException(status_code=422, detail=f"{body.op} needs a target step")

        snapshot = state.store.snapshot(session_id)
        steps = sorted(snapshot.steps, key=lambda s: s.order)
        tokens = parse_session_prompts(steps)
        consecutive = [
            jaccard_similarity(tokens[i], tokens[i + 1]) for i in range(len(steps) - 1)
        ]
        current = segment_stages(
            consecutive, len(steps), s_min, overrides=list(snapshot.overrides), skip_invalid=True
        )
        override = StageOverride(op=body.op, at=at)
        try:
            segmentation = with_override(current, len(steps), override)
        except InvalidOverride as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        state.store.append_override(session_id, override)
        state.invalidate(session_id)
        return {
            "stages": [list(r) for r in segmentation.stages],
            "applied_overrides": [
                {"op": o.op, "at": o.at} for o in segmentation.applied_overrides
            ],
        }

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}/assets/{{asset_id}}.png")
    def asset(session_id: str, asset_id: str) -> FileResponse:
        _session_or_404(session_id)
        try:
            found = state.store.get_asset(session_id, asset_id)
        except Exception:
            raise HTTPException(status_code=404, detail=f"unknown asset {asset_id}")
        return FileResponse(found.path, media_type="image/png")

    if config.frontend_dir is not None and config.frontend_dir.exists():
        app.mount(
            "/", StaticFiles(directory=config.frontend_dir, html=True), name="frontend"
        )

    return app
