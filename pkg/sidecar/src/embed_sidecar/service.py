"""HTTP service: POST /embed answers the binary format, GET /info reports
the encoder identity and dimensionality. Requests are handled serially;
clients must not assume pipelining.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .core import embed_to_bytes
from .encoder import ProviderConfig, build_encoder


def create_app(config: ProviderConfig) -> FastAPI:
    encoder = build_encoder(config)
    app = FastAPI(title="embed-sidecar")

    @app.get("/info")
    def info():
        return {"embedder_id": encoder.embedder_id, "dim": encoder.dim}

    @app.post("/embed")
    async def embed(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "bad_request", "detail": "body must be JSON"}, status_code=400)
        texts = body.get("texts")
        if not isinstance(texts, list) or not texts or not all(isinstance(t, str) for t in texts):
            return JSONResponse(
                {"error": "bad_request", "detail": "texts must be a non-empty list of strings"},
                status_code=400,
            )
        try:
            payload, warnings = embed_to_bytes(
                encoder,
                texts,
                level=body.get("level", "sentence"),
                pooling=body.get("pooling", config.pooling),
                max_rows=config.max_rows,
            )
        except ValueError as e:
            return JSONResponse({"error": "bad_request", "detail": str(e)}, status_code=400)
        headers = {}
        if warnings:
            headers["X-Embed-Warnings"] = str(len(warnings))
        return Response(payload, media_type="application/octet-stream", headers=headers)

    return app
