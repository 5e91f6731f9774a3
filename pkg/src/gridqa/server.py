"""HTTP/JSON API over the question-answering pipeline.

Stateless except for sessions: identical ``/api/ask`` calls without a
session id are pure functions of the loaded data. Every error response
is ``{"error": {"code", "message"}}``; stack traces never reach the body.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import Engine
from .errors import EmptyQuestion, GridQAError, ValidationError
from .session import SessionRegistry

#: HTTP status per error taxonomy code
STATUS = {
    "bad_request": 400,
    "not_found": 404,
    "parse_failed": 422,
    "no_target": 422,
    "internal": 500,
}


class AskBody(BaseModel):
    question: str
    session: str | None = None
    mode: str = "fresh"
    deps: str | None = None


class AnchorBody(BaseModel):
    vertex: str


def _error_response(code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=STATUS.get(code, 500),
        content={"error": {"code": code, "message": message}},
    )


def create_app(
    engine: Engine,
    registry: SessionRegistry | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    registry = registry or SessionRegistry(engine)
    app = FastAPI(title="gridqa", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(GridQAError)
    async def _domain_error(_request: Request, exc: GridQAError) -> JSONResponse:
        return _error_response(exc.code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _body_error(_request: Request, _exc: RequestValidationError) -> JSONResponse:
        return _error_response("bad_request", "invalid request body")

    @app.exception_handler(Exception)
    async def _unexpected(_request: Request, _exc: Exception) -> JSONResponse:
        return _error_response("internal", "internal error")

    @app.post("/api/ask")
    def api_ask(body: AskBody) -> dict:
        if not body.question.strip():
            raise EmptyQuestion("question must not be empty")
        if body.session is not None:
            try:
                result = registry.ask(body.session, body.question, body.mode, deps=body.deps)
            except ValueError as exc:
                raise ValidationError(str(exc)) from None
            doc = result.to_json()
            doc["session"] = body.session
            doc["context"] = registry.get(body.session).context_json()
            return doc
        if body.mode != "fresh":
            raise ValidationError("follow_up mode requires a session id")
        return engine.answer(body.question, deps=body.deps).to_json()

    @app.post("/api/session")
    def api_session_create() -> dict:
        session = registry.create()
        return {"session": session.id, "context": session.context_json()}

    @app.post("/api/session/{session_id}/anchor")
    def api_session_anchor(session_id: str, body: AnchorBody) -> dict:
        session = registry.anchor(session_id, body.vertex)
        return {"session": session.id, "context": session.context_json()}

    @app.get("/api/schema")
    def api_schema() -> dict:
        return engine.schema.to_json()

    @app.get("/api/graph/neighborhood")
    def api_neighborhood(vertex: str, hops: int = 1) -> dict:
        return engine.neighborhood(vertex, hops=hops)

    @app.get("/api/health")
    def api_health() -> dict:
        return {
            "status": "ok",
            "graph": engine.store.stats(),
            "evaluation_date": engine.evaluation_date.isoformat(),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


__all__ = ["AnchorBody", "AskBody", "STATUS", "create_app"]
