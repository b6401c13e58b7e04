"""Optional HTTP collection endpoint for listening-test submissions.

POST /results accepts the shared ratings JSON and appends one file per
submission; the UI falls back to a local download when unreachable.
"""
from __future__ import annotations

import json
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware

from .errors import SchemaViolation
from .ratings import validate_session


def make_app(out_dir) -> FastAPI:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="stepgan ratings collector")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/results")
    async def results(request: Request):
        try:
            doc = await request.json()
        except Exception as exc:
            raise HTTPException(status_code=400, detail=f"invalid JSON: {exc}")
        try:
            pages = validate_session(doc, source="submission")
        except SchemaViolation as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        participant = doc["participant"]["id"]
        stamp = time.strftime("%Y%m%dT%H%M%S")
        n = len(list(out.glob("*.json")))
        path = out / f"ratings_{participant}_{stamp}_{n:04d}.json"
        path.write_text(json.dumps(doc, indent=2))
        return {"stored": path.name, "pages": len(pages)}

    return app


def serve(out_dir, host: str = "127.0.0.1", port: int = 8077) -> None:
    import uvicorn

    uvicorn.run(make_app(out_dir), host=host, port=port)
