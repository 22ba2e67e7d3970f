"""HTTP service over a loaded corpus; the contract consumed by the web UI."""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse

from .errors import ProviderUnavailable, QueryError
from .fusion import DEFAULT_RRF_K, DEFAULT_TEMPORAL_CONSTANT, DEFAULT_TOP_K, DEFAULT_WINDOW
from .grid_meta import COLOR_TERMS, GRID_SIZE
from .ingest import Corpus
from .search import (
    PAGE_SIZES,
    parse_stage_query,
    ranked_payload,
    resolve_stage,
    run_temporal,
    temporal_payload,
    id_payload,
)

log = logging.getLogger(__name__)

MAX_TEMPORAL_STAGES = 4


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def create_app(corpus: Corpus, embedder, expander) -> FastAPI:
    app = FastAPI(title="vidsearch", version="0.1.0")

    @app.post("/api/search")
    async def api_search(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "bad_request", "request body must be JSON")
        page = body.get("page", 1) if isinstance(body, dict) else 1
        page_size = body.get("page_size") if isinstance(body, dict) else None
        try:
            stage = parse_stage_query(body)
            ranked = resolve_stage(corpus, stage, embedder, expander)
            payload = ranked_payload(ranked, page=page, page_size=page_size)
        except QueryError as exc:
            return _error(400, "bad_request", str(exc))
        except ProviderUnavailable as exc:
            return _error(503, "embedder_unavailable", str(exc))
        return JSONResponse(payload)

    @app.post("/api/temporal-search")
    async def api_temporal(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "bad_request", "request body must be JSON")
        try:
            stages_raw = body.get("stages")
            if not isinstance(stages_raw, list) or not (
                2 <= len(stages_raw) <= MAX_TEMPORAL_STAGES
            ):
                raise QueryError(
                    f"temporal search needs 2..{MAX_TEMPORAL_STAGES} stages"
                )
            window = body.get("window", DEFAULT_WINDOW)
            if not isinstance(window, int) or window < 1:
                raise QueryError("window must be a positive integer")
            top_k = body.get("top_k", DEFAULT_TOP_K)
            if not isinstance(top_k, int) or top_k < 1:
                raise QueryError("top_k must be a positive integer")
            stages = [parse_stage_query(s) for s in stages_raw]
            result = run_temporal(
                corpus, stages, window=window, top_k=top_k,
                embedder=embedder, expander=expander,
            )
        except QueryError as exc:
            return _error(400, "bad_request", str(exc))
        except ProviderUnavailable as exc:
            return _error(503, "embedder_unavailable", str(exc))
        return JSONResponse(temporal_payload(result))

    @app.get("/api/keyframes/{video_id}/{idx}/neighbors")
    async def api_neighbors(video_id: str, idx: int, n: int = 10):
        info = corpus.videos.get(video_id)
        if info is None or not (0 <= idx < info.keyframe_count):
            return _error(404, "not_found", f"unknown keyframe {video_id}/{idx}")
        if n < 1:
            return _error(400, "bad_request", "n must be positive")
        before = n // 2
        start = max(0, idx - before)
        after_quota = n - (idx - start)
        indices = list(range(start, idx)) + list(
            range(idx + 1, min(info.keyframe_count, idx + 1 + after_quota))
        )
        out = []
        for i in indices:
            kid = corpus.keyframe(video_id, i)
            d = id_payload(kid)
            d["media_url"] = f"/media/{video_id}/{i}.jpg"
            out.append(d)
        return JSONResponse({"neighbors": out})

    @app.get("/api/videos")
    async def api_videos():
        vids = [
            {
                "video_id": v.video_id,
                "fps": v.fps,
                "keyframe_count": v.keyframe_count,
            }
            for v in sorted(corpus.videos.values(), key=lambda v: v.video_id)
        ]
        return JSONResponse({"corpus_name": corpus.name, "videos": vids})

    @app.get("/api/config")
    async def api_config():
        classes = set()
        for rec in corpus.metadata.records:
            for entry in rec.tag_string.split():
                classes.add(entry.rstrip("0123456789"))
        return JSONResponse(
            {
                "corpus_name": corpus.name,
                "spaces": [
                    {"name": s.name, "dim": s.dim}
                    for s in sorted(corpus.spaces.values(), key=lambda s: s.name)
                ],
                "color_terms": list(COLOR_TERMS),
                "object_classes": sorted(classes),
                "grid_size": GRID_SIZE,
                "page_sizes": list(PAGE_SIZES),
                "defaults": {
                    "rrf_k": DEFAULT_RRF_K,
                    "temporal_constant": DEFAULT_TEMPORAL_CONSTANT,
                    "window": DEFAULT_WINDOW,
                    "top_k": DEFAULT_TOP_K,
                },
            }
        )

    @app.get("/media/{video_id}/{idx}.jpg")
    async def media(video_id: str, idx: int):
        if corpus.keyframe(video_id, idx) is None:
            return _error(404, "not_found", f"unknown keyframe {video_id}/{idx}")
        return FileResponse(corpus.media_path(video_id, idx), media_type="image/jpeg")

    return app
