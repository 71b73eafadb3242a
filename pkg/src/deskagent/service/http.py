"""HTTP control API over the session manager.

Routes (JSON bodies unless noted):

    POST /sessions                      create; body {instruction, ...options}
    GET  /sessions?status=&outcome=     list summaries
    GET  /sessions/{id}                 one record
    GET  /sessions/{id}/events?since=   server-sent events, resumable by seq
    POST /sessions/{id}/approval        {"decision": "approve"|"deny", "reason"?}
    POST /sessions/{id}/annotation      {"outcome", "error_category"?, "note"?}
    POST /sessions/{id}/abort
    GET  /sessions/{id}/screenshots/{n} PNG bytes

With a configured token, every request must carry "Authorization: Bearer
<token>". SSE events carry their sequence number as the SSE id, so clients
resume with ?since=<last id + 1> or the Last-Event-ID header.
"""

from __future__ import annotations

import json

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, StreamingResponse

from deskagent.service.manager import (
    SessionManager,
    SessionNotFound,
    SessionStateError,
)


def create_app(manager: SessionManager, token: str | None = None) -> FastAPI:
    app = FastAPI(title="deskagent session service", version="0.1.0")
    app.state.manager = manager
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def authorize(request: Request) -> None:
        required = token if token is not None else manager.config.token
        if not required:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {required}":
            raise HTTPException(status_code=401, detail="missing or bad bearer token")

    def _record_or_404(session_id: str):
        try:
            return manager.get_record(session_id)
        except SessionNotFound:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}") from None

    @app.post("/sessions", status_code=201)
    def create_session(body: dict, _: None = Depends(authorize)) -> dict:
        instruction = body.get("instruction", "")
        options = {k: v for k, v in body.items() if k != "instruction"}
        try:
            record = manager.create_session(instruction, options)
        except SessionStateError as exc:
            status = 409 if "already exists" in str(exc) else 400
            raise HTTPException(status_code=status, detail=str(exc)) from exc
        return record.to_dict()

    @app.get("/sessions")
    def list_sessions(
        status: str | None = None,
        outcome: str | None = None,
        _: None = Depends(authorize),
    ) -> list[dict]:
        return [r.to_dict() for r in manager.list_records(status=status, outcome=outcome)]

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str, _: None = Depends(authorize)) -> dict:
        return _record_or_404(session_id).to_dict()

    @app.get("/sessions/{session_id}/events")
    def stream_events(
        session_id: str,
        request: Request,
        since: int | None = None,
        _: None = Depends(authorize),
    ) -> StreamingResponse:
        _record_or_404(session_id)
        if since is None:
            last_id = request.headers.get("last-event-id")
            since = int(last_id) + 1 if last_id else 0

        def sse() -> "iter[str]":
            for event in manager.events_since(session_id, since):
                data = json.dumps(event["payload"], sort_keys=True)
                yield f"id: {event['seq']}\nevent: {event['type']}\ndata: {data}\n\n"

        return StreamingResponse(
            sse(),
            media_type="text/event-stream",
            headers={"cache-control": "no-cache", "x-accel-buffering": "no"},
        )

    @app.post("/sessions/{session_id}/approval")
    def resolve_approval(session_id: str, body: dict, _: None = Depends(authorize)) -> dict:
        _record_or_404(session_id)
        decision = body.get("decision")
        if decision not in ("approve", "deny"):
            raise HTTPException(status_code=400, detail="decision must be approve or deny")
        try:
            record = manager.resolve_approval(
                session_id, decision == "approve", body.get("reason")
            )
        except SessionStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return record.to_dict()

    @app.post("/sessions/{session_id}/annotation")
    def annotate(session_id: str, body: dict, _: None = Depends(authorize)) -> dict:
        _record_or_404(session_id)
        outcome = body.get("outcome")
        if not outcome:
            raise HTTPException(status_code=400, detail="outcome is required")
        try:
            record = manager.annotate(
                session_id,
                outcome,
                error_category=body.get("error_category"),
                note=body.get("note"),
            )
        except SessionStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return record.to_dict()

    @app.post("/sessions/{session_id}/abort")
    def abort(session_id: str, _: None = Depends(authorize)) -> dict:
        _record_or_404(session_id)
        try:
            record = manager.abort(session_id)
        except SessionStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return record.to_dict()

    @app.get("/sessions/{session_id}/screenshots/{index}")
    def screenshot(session_id: str, index: int, _: None = Depends(authorize)) -> FileResponse:
        try:
            path = manager.screenshot_path(session_id, index)
        except SessionNotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return FileResponse(path, media_type="image/png")

    return app
