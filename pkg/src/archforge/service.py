"""HTTP facade over the engines, backing the explorer UI and automation.

Sessions hold a catalog, a query draft, and the latest results in memory with
TTL eviction. Solves that exceed a short window return 202 plus a poll URL so
interactive clients stay responsive.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import documents
from .documents import DocumentError
from .explain import ExplainRequest, InvalidRequest, explain, render_template
from .model import Catalog, Query, validate_catalog
from .solver import SolverTimeout
from .synthesis import Design, Infeasibility, SynthesisError, synthesize

DEFER_AFTER_SECONDS = 2.0
SESSION_TTL_SECONDS = 3600.0


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, details: Optional[list] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or []


@dataclass
class Job:
    job_id: str
    status: str = "running"  # running | done | failed
    result: Optional[dict] = None
    error: Optional[dict] = None


@dataclass
class SessionState:
    session_id: str
    catalog: Catalog
    query: Optional[Query] = None
    last_design: Optional[Design] = None
    last_design_doc: Optional[dict] = None
    explanations: list[dict] = field(default_factory=list)
    jobs: dict[str, Job] = field(default_factory=dict)
    touched: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def touch(self):
        self.touched = time.monotonic()


class SessionRegistry:
    """Isolated sessions behind a single writer lock; eviction never touches
    a session mid-solve (each solve holds the session's own lock)."""

    def __init__(self, ttl_seconds: float = SESSION_TTL_SECONDS):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionState] = {}

    def create(self, catalog: Catalog) -> SessionState:
        state = SessionState(session_id=uuid.uuid4().hex[:12], catalog=catalog)
        with self._lock:
            self._evict_locked()
            self._sessions[state.session_id] = state
        return state

    def get(self, session_id: str) -> SessionState:
        with self._lock:
            state = self._sessions.get(session_id)
        if state is None:
            raise ServiceError(404, "unknown-session", f"no session {session_id!r}")
        state.touch()
        return state

    def delete(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)

    def _evict_locked(self) -> None:
        now = time.monotonic()
        for sid in [s for s, st in self._sessions.items() if now - st.touched > self.ttl]:
            state = self._sessions[sid]
            if state.lock.locked():
                continue  # in-flight solve; next eviction pass collects it
            del self._sessions[sid]


def create_app(
    default_catalog: Optional[Catalog] = None,
    budget_seconds: float = 30.0,
    defer_after: float = DEFER_AFTER_SECONDS,
) -> FastAPI:
    app = FastAPI(title="archforge", version="0.1.0")
    registry = SessionRegistry()
    app.state.registry = registry

    @app.exception_handler(ServiceError)
    async def service_error_handler(_req: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    def load_catalog_payload(payload: dict) -> Catalog:
        if "catalog" in payload:
            return documents.catalog_from_json(payload["catalog"], where="body.catalog")
        if default_catalog is not None:
            return default_catalog
        raise ServiceError(400, "missing-catalog", "provide a catalog document")

    def parse_query(state: SessionState, payload: dict) -> Query:
        if "query" in payload:
            query = documents.query_from_json(payload["query"], where="body.query")
        elif state.query is not None:
            query = state.query
        else:
            raise ServiceError(400, "missing-query", "no query draft for this session")
        report = validate_catalog(state.catalog, query)
        if not report.ok:
            raise ServiceError(
                422,
                "invalid-query",
                "catalog/query validation failed",
                [str(v) for v in report.sorted()],
            )
        return query

    def run_deferred(state: SessionState, work) -> tuple[int, dict]:
        """Run work(); return (200, result) fast or (202, poll doc) if slow."""
        job = Job(job_id=uuid.uuid4().hex[:12])
        state.jobs[job.job_id] = job
        done = threading.Event()

        def runner():
            try:
                job.result = work()
                job.status = "done"
            except ServiceError as exc:
                job.error = {"code": exc.code, "message": exc.message, "details": exc.details}
                job.status = "failed"
            except SolverTimeout:
                job.error = {"code": "solver-timeout", "message": "budget exhausted", "details": []}
                job.status = "failed"
            except (SynthesisError, DocumentError, InvalidRequest) as exc:
                job.error = {"code": "bad-input", "message": str(exc), "details": []}
                job.status = "failed"
            finally:
                done.set()

        thread = threading.Thread(target=runner, daemon=True)
        thread.start()
        if done.wait(timeout=defer_after) and job.status != "running":
            return _job_response(job)
        return 202, {
            "job": job.job_id,
            "status": "running",
            "poll": f"/v1/sessions/{state.session_id}/jobs/{job.job_id}",
        }

    def _job_response(job: Job) -> tuple[int, dict]:
        if job.status == "failed":
            error = job.error or {"code": "internal", "message": "job failed", "details": []}
            status = 408 if error.get("code") == "solver-timeout" else 422
            return status, error
        return 200, job.result or {}

    @app.post("/v1/sessions", status_code=201)
    async def create_session(payload: dict):
        catalog = load_catalog_payload(payload or {})
        report = validate_catalog(catalog)
        if not report.ok:
            raise ServiceError(
                422,
                "invalid-catalog",
                "catalog validation failed",
                [str(v) for v in report.sorted()],
            )
        state = registry.create(catalog)
        return {"session": state.session_id}

    @app.get("/v1/catalog/{section}")
    async def catalog_section(section: str):
        if default_catalog is None:
            raise ServiceError(404, "no-default-catalog", "service started without a catalog")
        doc = documents.catalog_to_json(default_catalog)
        if section not in ("systems", "hardware", "roles", "orderings", "schemas", "objectives"):
            raise ServiceError(404, "unknown-section", f"no catalog section {section!r}")
        return {section: doc[section]}

    @app.put("/v1/sessions/{session_id}/query")
    async def put_query(session_id: str, payload: dict):
        state = registry.get(session_id)
        query = parse_query(state, {"query": payload})
        with state.lock:
            state.query = query
        return {"ok": True}

    @app.post("/v1/sessions/{session_id}/synthesize")
    async def synthesize_endpoint(session_id: str, payload: Optional[dict] = None):
        state = registry.get(session_id)
        query = parse_query(state, payload or {})

        def work():
            with state.lock:
                state.query = query
                out = synthesize(state.catalog, query, budget_seconds=budget_seconds)
                if isinstance(out, Infeasibility):
                    return {
                        "infeasible": True,
                        "core": [
                            {"track": t, "kind": o.kind, "label": o.label}
                            for t, o in out.core
                        ],
                    }
                state.last_design = out
                state.last_design_doc = documents.design_to_json(out)
                return state.last_design_doc

        status, body = run_deferred(state, work)
        return JSONResponse(status_code=status, content=body)

    @app.post("/v1/sessions/{session_id}/explain")
    async def explain_endpoint(session_id: str, payload: dict):
        state = registry.get(session_id)
        if state.last_design is None:
            raise ServiceError(409, "no-design", "synthesize before asking for explanations")
        request = ExplainRequest(
            workload=payload.get("workload", ""),
            role=payload.get("role", ""),
            preferred=payload.get("prefer", ""),
            objective=payload.get("objective", "latency"),
            flexible=frozenset(payload.get("flexible", [])),
        )

        def work():
            with state.lock:
                try:
                    explanation = explain(
                        state.catalog,
                        state.query,
                        state.last_design,
                        request,
                        budget_seconds=budget_seconds,
                    )
                except InvalidRequest as exc:
                    raise ServiceError(422, "invalid-request", str(exc))
                doc = documents.explanation_to_json(explanation)
                doc["rendered"] = render_template(explanation)
                state.explanations.append(doc)
                return doc

        status, body = run_deferred(state, work)
        return JSONResponse(status_code=status, content=body)

    @app.get("/v1/sessions/{session_id}/jobs/{job_id}")
    async def poll_job(session_id: str, job_id: str):
        state = registry.get(session_id)
        job = state.jobs.get(job_id)
        if job is None:
            raise ServiceError(404, "unknown-job", f"no job {job_id!r}")
        if job.status == "running":
            return JSONResponse(
                status_code=202,
                content={
                    "job": job.job_id,
                    "status": "running",
                    "poll": f"/v1/sessions/{session_id}/jobs/{job_id}",
                },
            )
        status, body = _job_response(job)
        return JSONResponse(status_code=status, content=body)

    @app.get("/v1/sessions/{session_id}/designs/latest")
    async def latest_design(session_id: str):
        state = registry.get(session_id)
        if state.last_design_doc is None:
            raise ServiceError(404, "no-design", "no design synthesized yet")
        return state.last_design_doc

    @app.delete("/v1/sessions/{session_id}", status_code=204)
    async def delete_session(session_id: str):
        registry.delete(session_id)
        return None

    return app


def serve(
    bind: str = "127.0.0.1:8335",
    catalog_paths: Optional[list[str]] = None,
    budget_seconds: float = 30.0,
) -> None:
    import uvicorn

    catalog = None
    if catalog_paths:
        catalog = documents.load_catalog(catalog_paths)
    host, _, port = bind.partition(":")
    app = create_app(default_catalog=catalog, budget_seconds=budget_seconds)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8335), log_level="warning")


if __name__ == "__main__":  # pragma: no cover
    import sys

    serve(catalog_paths=sys.argv[1:] or None)
