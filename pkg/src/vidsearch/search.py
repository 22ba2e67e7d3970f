"""Stage-query parsing, resolution, and wire serialization.

One code path serves both the CLI and the HTTP service so their outputs
never drift: requests are plain JSON dicts, parsed here into typed stage
queries, resolved against a Corpus, and serialized back with identical
formatting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import QueryError
from .fusion import (
    DEFAULT_RRF_K,
    DEFAULT_TEMPORAL_CONSTANT,
    DEFAULT_TOP_K,
    DEFAULT_WINDOW,
    FusionConfig,
    TemporalResult,
    expansion_fuse,
    rrf_fuse,
    temporal_fuse,
)
from .grid_meta import DEFAULT_FUZZINESS, GridOperator, GridQuery
from .ingest import Corpus
from .model import KeyframeId, RankedList
from .providers import ExpansionRequest, embed_text, expand_query

PAGE_SIZES = (10, 20, 50)
DEFAULT_EXPANSION_N = 3


@dataclass(frozen=True)
class EmbeddingStage:
    space: str
    text: str | None = None
    vector: tuple[float, ...] | None = None
    expand: bool = False
    top_k: int = DEFAULT_TOP_K


@dataclass(frozen=True)
class MetadataStage:
    grid: GridQuery | None = None
    tags: str | None = None
    ocr: str | None = None
    fuzziness: float = DEFAULT_FUZZINESS
    top_k: int = DEFAULT_TOP_K


@dataclass(frozen=True)
class MultiStage:
    queries: tuple["StageQuery", ...]
    top_k: int = DEFAULT_TOP_K


StageQuery = EmbeddingStage | MetadataStage | MultiStage


def _top_k(d: dict) -> int:
    top_k = d.get("top_k", DEFAULT_TOP_K)
    if not isinstance(top_k, int) or top_k < 1:
        raise QueryError("top_k must be a positive integer")
    return top_k


def parse_stage_query(d: dict) -> StageQuery:
    if not isinstance(d, dict):
        raise QueryError("stage query must be an object")
    kind = d.get("kind")
    if kind == "embedding":
        space = d.get("space")
        if not space:
            raise QueryError("embedding query needs a space")
        text, vector = d.get("text"), d.get("vector")
        if (text is None) == (vector is None):
            raise QueryError("embedding query needs exactly one of text or vector")
        if vector is not None:
            try:
                vector = tuple(float(v) for v in vector)
            except (TypeError, ValueError) as exc:
                raise QueryError("vector must be a list of numbers") from exc
        return EmbeddingStage(
            space=space,
            text=text,
            vector=vector,
            expand=bool(d.get("expand", False)),
            top_k=_top_k(d),
        )
    if kind == "metadata":
        grid = None
        if d.get("grid") is not None:
            g = d["grid"]
            try:
                constraints = tuple(
                    (c["cell"], c["class"]) for c in g.get("constraints", [])
                )
                grid = GridQuery(
                    constraints=constraints,
                    operator=GridOperator(g.get("operator", "AND")),
                    fuzziness=float(g.get("fuzziness", DEFAULT_FUZZINESS)),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise QueryError(f"bad grid query: {exc}") from exc
        tags, ocr = d.get("tags"), d.get("ocr")
        if grid is None and not tags and not ocr:
            raise QueryError("metadata query needs at least one of grid, tags, ocr")
        fuzziness = float(d.get("fuzziness", DEFAULT_FUZZINESS))
        if not (0.0 <= fuzziness <= 1.0):
            raise QueryError("fuzziness must lie in [0, 1]")
        return MetadataStage(grid=grid, tags=tags, ocr=ocr, fuzziness=fuzziness, top_k=_top_k(d))
    if kind == "multi":
        subs = d.get("queries")
        if not subs or not isinstance(subs, list):
            raise QueryError("multi query needs a non-empty queries list")
        parsed = tuple(parse_stage_query(s) for s in subs)
        if any(isinstance(p, MultiStage) for p in parsed):
            raise QueryError("multi queries cannot nest")
        return MultiStage(queries=parsed, top_k=_top_k(d))
    raise QueryError(f"unknown query kind: {kind!r}")


def resolve_stage(
    corpus: Corpus, stage: StageQuery, embedder, expander
) -> RankedList:
    """Run one stage query against the corpus; shared by /api/search and the CLI."""
    if isinstance(stage, EmbeddingStage):
        space = corpus.spaces.get(stage.space)
        if space is None:
            raise QueryError(f"unknown embedding space {stage.space!r}")
        if stage.vector is not None:
            return space.search(np.asarray(stage.vector), stage.top_k)
        variants = [stage.text]
        if stage.expand:
            variants = expand_query(
                ExpansionRequest(query_text=stage.text, n=DEFAULT_EXPANSION_N),
                expander,
            )
        per_variant = [
            space.search(embed_text(v, stage.space, embedder), stage.top_k)
            for v in variants
        ]
        if len(per_variant) == 1:
            return per_variant[0]
        return expansion_fuse(per_variant, top_k=stage.top_k)

    if isinstance(stage, MetadataStage):
        sublists = []
        if stage.grid is not None:
            sublists.append(corpus.metadata.grid_search(stage.grid, stage.top_k))
        if stage.tags:
            sublists.append(
                corpus.metadata.text_search("tags", stage.tags, stage.top_k, stage.fuzziness)
            )
        if stage.ocr:
            sublists.append(
                corpus.metadata.text_search("ocr", stage.ocr, stage.top_k, stage.fuzziness)
            )
        if len(sublists) == 1:
            return sublists[0]
        return rrf_fuse(sublists, rrf_k=DEFAULT_RRF_K, top_k=stage.top_k)

    # multi: run each sub-query independently, then RRF the results
    sublists = [
        resolve_stage(corpus, sub, embedder, expander) for sub in stage.queries
    ]
    if len(sublists) == 1:
        return sublists[0]
    return rrf_fuse(sublists, rrf_k=DEFAULT_RRF_K, top_k=stage.top_k)


def run_temporal(
    corpus: Corpus,
    stages: list[StageQuery],
    window: int = DEFAULT_WINDOW,
    top_k: int = DEFAULT_TOP_K,
    embedder=None,
    expander=None,
) -> TemporalResult:
    if len(stages) < 2:
        raise QueryError("temporal search needs at least 2 stages")
    stage_lists = [resolve_stage(corpus, s, embedder, expander) for s in stages]
    cfg = FusionConfig(
        temporal_constant=DEFAULT_TEMPORAL_CONSTANT, window=window, top_k=top_k
    )
    return temporal_fuse(stage_lists, cfg)


# ---------------------------------------------------------------------------
# wire serialization (shared byte-exact by CLI and service)

def id_payload(kid: KeyframeId) -> dict:
    return {
        "video_id": kid.video_id,
        "keyframe_index": kid.keyframe_index,
        "frame_number": kid.frame_number,
        "timestamp_ms": kid.timestamp_ms,
    }


def hit_payload(kid: KeyframeId, score: float) -> dict:
    d = id_payload(kid)
    d["score"] = float(score)
    return d


def ranked_payload(rl: RankedList, page: int = 1, page_size: int | None = None) -> dict:
    hits = [hit_payload(kid, score) for kid, score in rl.hits]
    if page_size is None:
        return {"hits": hits, "total": len(hits)}
    if page_size not in PAGE_SIZES:
        raise QueryError(f"page_size must be one of {PAGE_SIZES}")
    if page < 1:
        raise QueryError("page must be >= 1")
    start = (page - 1) * page_size
    return {
        "hits": hits[start : start + page_size],
        "total": len(hits),
        "page": page,
        "page_size": page_size,
    }


def temporal_payload(result: TemporalResult) -> dict:
    hits = []
    for h in result.hits:
        d = hit_payload(h.pivot, h.score)
        d["chain"] = [None if c is None else id_payload(c) for c in h.chain]
        hits.append(d)
    return {"hits": hits, "total": len(hits)}


def dump_json(obj) -> str:
    """Single canonical JSON encoding (matches starlette's JSONResponse)."""
    return json.dumps(obj, ensure_ascii=False, allow_nan=False, separators=(",", ":"))
