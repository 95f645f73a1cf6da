"""Turn-based HTTP API over the engine, plus static hosting for the web chat.

The wire format is documented in docs/wire_protocol.md; every body is JSON in
the canonical serialization of the core types.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..errors import (
    SessionClosedError,
    SessionNotFoundError,
    UtteranceTooLongError,
    WireFormatError,
)
from .engine import Engine


class CreateSessionRequest(BaseModel):
    seed: int | None = None


class TurnRequest(BaseModel):
    utterance: str | None = None
    payload: dict[str, Any] | None = None


def create_app(engine: Engine, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="cinebot", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SessionNotFoundError)
    async def _not_found(_: Request, exc: SessionNotFoundError):
        return JSONResponse({"error": str(exc)}, status_code=404)

    @app.exception_handler(SessionClosedError)
    async def _conflict(_: Request, exc: SessionClosedError):
        return JSONResponse({"error": str(exc)}, status_code=409)

    @app.exception_handler(UtteranceTooLongError)
    async def _too_long(_: Request, exc: UtteranceTooLongError):
        return JSONResponse({"error": str(exc)}, status_code=422)

    @app.exception_handler(WireFormatError)
    async def _bad_wire(_: Request, exc: WireFormatError):
        return JSONResponse({"error": str(exc)}, status_code=422)

    @app.get("/api/health")
    def health() -> dict[str, Any]:
        return {"status": "ok", "catalog_items": len(engine.catalog)}

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionRequest | None = None) -> dict[str, Any]:
        response = engine.create_session(body.seed if body else None)
        return {"session_id": response.session_id, "response": response.to_dict()}

    @app.post("/api/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnRequest) -> dict[str, Any]:
        response = engine.post_turn(
            session_id, utterance=body.utterance, payload=body.payload
        )
        return response.to_dict()

    @app.get("/api/sessions/{session_id}/transcript")
    def transcript(session_id: str, format: str = "structured"):
        if format in ("text", "plain-text"):
            return PlainTextResponse(engine.export_transcript(session_id, "text"))
        return engine.export_transcript(session_id, "structured")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
