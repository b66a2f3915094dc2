"""HTTP service over the dialog engine.

POST /ask       {question, session_id?, debug?} -> AskResponse
GET  /kb/stats  ?qa_count=N -> KbStats
POST /kb/reload -> {version}
GET  /healthz   -> {status, kb_version}

400 malformed request, 422 empty question, 503 before the first load.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import ParseError, ValidationError
from .ranking import RankWeights
from .service import AskRequest, DialogService
from .store import SnapshotHolder, compute_stats


def create_app(
    kb_dir: str | Path,
    weights: RankWeights | str | Path | None = None,
    config: EngineConfig = DEFAULT_CONFIG,
    eager: bool = True,
) -> FastAPI:
    """Build the service app; eager loads the KB before serving."""
    holder = SnapshotHolder(kb_dir)
    if isinstance(weights, (str, Path)):
        weights = RankWeights.load(weights)
    service = DialogService(holder, weights, config)
    if eager:
        holder.load()

    app = FastAPI(title="kgqa", docs_url=None, redoc_url=None)
    app.state.service = service
    app.state.holder = holder

    def not_loaded() -> JSONResponse:
        return JSONResponse({"error": "knowledge base not loaded"}, status_code=503)

    @app.post("/ask")
    async def ask(request: Request):
        if holder.current is None:
            return not_loaded()
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return JSONResponse({"error": "body must be valid JSON"}, status_code=400)
        if not isinstance(body, dict) or not isinstance(body.get("question"), str):
            return JSONResponse(
                {"error": "body must be an object with a string 'question'"},
                status_code=400,
            )
        session_id = body.get("session_id")
        if session_id is not None and not isinstance(session_id, str):
            return JSONResponse({"error": "session_id must be a string"}, status_code=400)
        top_k = body.get("top_k_override")
        if top_k is not None and (isinstance(top_k, bool) or not isinstance(top_k, int)):
            return JSONResponse({"error": "top_k_override must be an integer"}, status_code=400)
        if not body["question"].strip():
            return JSONResponse({"error": "question is empty"}, status_code=422)
        req = AskRequest(
            question=body["question"],
            session_id=session_id,
            debug=bool(body.get("debug", False)),
            top_k_override=top_k,
        )
        return JSONResponse(service.ask_dict(req))

    @app.get("/kb/stats")
    async def kb_stats(qa_count: int | None = None):
        kb = holder.current
        if kb is None:
            return not_loaded()
        if qa_count is not None and qa_count < 0:
            return JSONResponse({"error": "qa_count must be >= 0"}, status_code=400)
        return JSONResponse(compute_stats(kb, qa_count).to_dict())

    @app.post("/kb/reload")
    async def kb_reload():
        try:
            kb = holder.load()
        except (ParseError, ValidationError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=500)
        return JSONResponse({"version": kb.version})

    @app.get("/healthz")
    async def healthz():
        kb = holder.current
        if kb is None:
            return not_loaded()
        return JSONResponse({"status": "ok", "kb_version": kb.version})

    return app
