"""HTTP API over the engine, with an in-process job queue for long runs.

Universe generation against a live model takes minutes, so Generate and
community-level Multiverse run as polled jobs; WhatIf and thread-level
Multiverse are a handful of completions and run synchronously.
"""

from __future__ import annotations

import hashlib
import json
import os
import queue
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Header, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import scenario
from .engine import generate_universe
from .errors import (
    BackendUnavailableError,
    InvalidSpecError,
    NotFoundError,
    SimulacraError,
)
from .gateway import AuditLog, backend_from_env
from .model import GenerationConfig, CommunityDesign, validate_design
from .scenario import WhatIfSpec, multiverse_community
from .store import Store

ENV_PORT = "SIMULACRA_PORT"
ENV_TOKEN = "SIMULACRA_TOKEN"

PAGE_SIZE = 20

JOB_GENERATE = "generate"
JOB_MULTIVERSE = "multiverse_community"

STATE_QUEUED = "queued"
STATE_RUNNING = "running"
STATE_DONE = "done"
STATE_FAILED = "failed"


@dataclass
class Job:
    id: str
    kind: str
    state: str = STATE_QUEUED
    threads_done: int = 0
    threads_total: int = 0
    universe_id: str | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "state": self.state,
            "progress": {"threads_done": self.threads_done, "threads_total": self.threads_total},
            "universe_id": self.universe_id,
            "error": self.error,
        }


class JobQueue:
    """Single-worker queue: generation jobs run one at a time."""

    def __init__(self):
        self._queue: queue.Queue = queue.Queue()
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._worker = threading.Thread(target=self._run, daemon=True)
        self._worker.start()

    def submit(self, kind: str, fn) -> Job:
        job = Job(id="j-" + uuid.uuid4().hex[:12], kind=kind)
        with self._lock:
            self._jobs[job.id] = job
        self._queue.put((job, fn))
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def _run(self):
        while True:
            job, fn = self._queue.get()
            job.state = STATE_RUNNING
            try:
                job.universe_id = fn(job)
                job.state = STATE_DONE
            except Exception as exc:
                job.error = f"{type(exc).__name__}: {exc}"
                job.state = STATE_FAILED


def _body_fingerprint(body: bytes) -> str:
    return hashlib.sha256(body).hexdigest()


def create_app(store: Store | None = None, backend=None) -> FastAPI:
    store = store or Store()
    if backend is None:
        backend = backend_from_env(AuditLog(store.audit_path))
    jobs = JobQueue()
    token = os.environ.get(ENV_TOKEN, "")
    idempotency: dict[str, tuple[str, int, dict]] = {}
    idempotency_lock = threading.Lock()

    app = FastAPI(title="simulacra", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(NotFoundError)
    async def _not_found(request, exc):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(InvalidSpecError)
    async def _invalid(request, exc):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(BackendUnavailableError)
    async def _unavailable(request, exc):
        return JSONResponse(status_code=503, content={"error": str(exc)})

    async def _authorized(request: Request) -> bool:
        if not token:
            return True
        return request.headers.get("Authorization") == f"Bearer {token}"

    async def _read_body(request: Request) -> tuple[dict, bytes]:
        raw = await request.body()
        if not raw:
            return {}, raw
        try:
            return json.loads(raw), raw
        except ValueError:
            raise HTTPException(status_code=422, detail="request body is not valid JSON")

    def _replay_or_record(key: str | None, raw: bytes, make_response):
        """Give mutating endpoints exactly-once semantics under retries."""
        if key is None:
            return make_response()
        fingerprint = _body_fingerprint(raw)
        with idempotency_lock:
            hit = idempotency.get(key)
        if hit is not None:
            if hit[0] != fingerprint:
                return JSONResponse(status_code=409,
                                    content={"error": "idempotency key reused with a different body"})
            return JSONResponse(status_code=hit[1], content=hit[2])
        response = make_response()
        if isinstance(response, JSONResponse):
            status, content = response.status_code, json.loads(bytes(response.body))
        else:
            status, content = 200, response
        if 200 <= status < 300:
            with idempotency_lock:
                idempotency[key] = (fingerprint, status, content)
        return response

    @app.middleware("http")
    async def _auth_middleware(request: Request, call_next):
        if not await _authorized(request):
            return JSONResponse(status_code=401, content={"error": "unauthorized"})
        return await call_next(request)

    # -- designs -----------------------------------------------------------

    @app.post("/api/designs")
    async def create_design(request: Request,
                            idempotency_key: str | None = Header(default=None)):
        body, raw = await _read_body(request)

        def run():
            violations = validate_design(body)
            if violations:
                return JSONResponse(status_code=422, content={"violations": violations})
            design = CommunityDesign.from_dict(body)
            design_id = store.save_design(design)
            return {"design_id": design_id}

        return _replay_or_record(idempotency_key, raw, run)

    @app.get("/api/designs/{design_id}")
    async def get_design(design_id: str):
        return store.load_design(design_id).to_dict()

    # -- generation jobs ---------------------------------------------------

    def _enqueue_universe(design_id: str, overrides: dict, kind: str):
        design = store.load_design(design_id)
        try:
            config = GenerationConfig.from_dict(overrides)
        except SimulacraError as exc:
            raise InvalidSpecError(str(exc))

        def run(job: Job):
            job.threads_total = config.thread_count

            def progress(done, total):
                job.threads_done = done
                job.threads_total = total

            if kind == JOB_MULTIVERSE:
                # config.rng_seed seeds Generate only; multiverse resamples
                # fresh unless the caller pins multiverse_rng_seed explicitly
                universe = multiverse_community(
                    design_id, design, config, backend,
                    rng_seed=overrides.get("multiverse_rng_seed"),
                    progress_cb=progress)
            else:
                universe = generate_universe(
                    design, config, backend,
                    parent_community=design_id,
                    progress_cb=progress)
            store.save_universe(universe)
            return universe.id

        job = jobs.submit(kind, run)
        return {"job_id": job.id}

    @app.post("/api/designs/{design_id}/generate")
    async def generate(design_id: str, request: Request,
                       idempotency_key: str | None = Header(default=None)):
        body, raw = await _read_body(request)
        return _replay_or_record(
            idempotency_key, raw, lambda: _enqueue_universe(design_id, body, JOB_GENERATE))

    @app.post("/api/designs/{design_id}/multiverse")
    async def multiverse(design_id: str, request: Request,
                         idempotency_key: str | None = Header(default=None)):
        body, raw = await _read_body(request)
        return _replay_or_record(
            idempotency_key, raw, lambda: _enqueue_universe(design_id, body, JOB_MULTIVERSE))

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise NotFoundError(f"unknown job: {job_id}")
        return job.to_dict()

    # -- universes ---------------------------------------------------------

    @app.get("/api/universes")
    async def list_universes(parent_community: str | None = None):
        return {"universes": store.list_universes(parent_community)}

    @app.get("/api/universes/{universe_id}")
    async def get_universe(universe_id: str):
        return store.load_universe(universe_id).to_dict()

    @app.get("/api/universes/{universe_id}/threads")
    async def get_threads(universe_id: str, page: int = 0):
        universe = store.load_universe(universe_id)
        start = page * PAGE_SIZE
        threads = universe.threads[start: start + PAGE_SIZE]
        return {
            "page": page,
            "page_size": PAGE_SIZE,
            "total": len(universe.threads),
            "threads": [t.to_dict() for t in threads],
        }

    @app.get("/api/universes/{universe_id}/branches")
    async def get_branches(universe_id: str):
        store.load_universe(universe_id)
        return {"branches": [b.to_dict() for b in store.load_branches(universe_id)]}

    # -- whatif / multiverse-thread ---------------------------------------

    @app.post("/api/universes/{universe_id}/whatif")
    async def whatif(universe_id: str, request: Request,
                     idempotency_key: str | None = Header(default=None)):
        body, raw = await _read_body(request)

        def run():
            universe = store.load_universe(universe_id)
            try:
                spec = WhatIfSpec.from_dict(body)
            except (KeyError, TypeError) as exc:
                raise InvalidSpecError(f"bad whatif spec: {exc}")
            extra = [b.thread for b in store.load_branches(universe_id)]
            if spec.intervention_text:
                branches = scenario.whatif_intervention(universe, spec, backend, extra)
            else:
                branches = scenario.whatif_reply(universe, spec, backend, extra)
            store.append_threads(universe_id, branches)
            return {"branches": [b.to_dict() for b in branches]}

        return _replay_or_record(idempotency_key, raw, run)

    @app.post("/api/universes/{universe_id}/threads/{thread_id}/multiverse")
    async def multiverse_thread(universe_id: str, thread_id: str, request: Request,
                                idempotency_key: str | None = Header(default=None)):
        body, raw = await _read_body(request)

        def run():
            universe = store.load_universe(universe_id)
            extra = [b.thread for b in store.load_branches(universe_id)]
            branches = scenario.multiverse_thread(
                universe, thread_id,
                int(body.get("at_utterance_index", 0)),
                int(body.get("k", 3)),
                backend, extra)
            store.append_threads(universe_id, branches)
            return {"branches": [b.to_dict() for b in branches]}

        return _replay_or_record(idempotency_key, raw, run)

    return app


def main():
    import uvicorn
    port = int(os.environ.get(ENV_PORT, "8080"))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
