"""Rank and score fusion: reciprocal rank fusion, query-expansion max-dedupe,
and cross-modal temporal event retrieval over staged ranked lists."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import MixedSpaces
from .model import KeyframeId, RankedList, sort_hits

DEFAULT_RRF_K = 60.0
DEFAULT_TEMPORAL_CONSTANT = 100.0
DEFAULT_WINDOW = 10
DEFAULT_TOP_K = 100


@dataclass(frozen=True)
class FusionConfig:
    rrf_k: float = DEFAULT_RRF_K
    temporal_constant: float = DEFAULT_TEMPORAL_CONSTANT
    window: int = DEFAULT_WINDOW
    top_k: int = DEFAULT_TOP_K

    def __post_init__(self):
        if self.rrf_k <= 0 or self.temporal_constant <= 0:
            raise ValueError("rrf_k and temporal_constant must be positive")
        if self.window < 1 or self.top_k < 1:
            raise ValueError("window and top_k must be positive")


def rrf_fuse(
    lists: list[RankedList], rrf_k: float = DEFAULT_RRF_K, top_k: int = DEFAULT_TOP_K
) -> RankedList:
    """RRF(d) = sum over lists containing d of 1 / (rrf_k + rank(d))."""
    if not lists:
        raise ValueError("rrf_fuse needs at least one list")
    terms: dict[KeyframeId, list[float]] = {}
    for rl in lists:
        for rank, (kid, _) in enumerate(rl.hits, 1):
            terms.setdefault(kid, []).append(1.0 / (rrf_k + rank))
    # canonical summation order keeps the result invariant to list order
    scored = {kid: math.fsum(sorted(ts)) for kid, ts in terms.items()}
    hits = sort_hits(scored)[:top_k]
    return RankedList(hits=hits, origin="rrf")


def expansion_fuse(
    per_query_results: list[RankedList], top_k: int = DEFAULT_TOP_K
) -> RankedList:
    """Distinct ids keep their maximum similarity across expanded-query lists.

    All lists must come from the same embedding space (origins must agree);
    similarity scores are otherwise not comparable.
    """
    if not per_query_results:
        raise ValueError("expansion_fuse needs at least one list")
    origins = {rl.origin for rl in per_query_results if rl.origin}
    if len(origins) > 1:
        raise MixedSpaces(f"cannot max-fuse across spaces: {sorted(origins)}")
    scored: dict[KeyframeId, float] = {}
    for rl in per_query_results:
        for kid, score in rl.hits:
            if kid not in scored or score > scored[kid]:
                scored[kid] = score
    hits = sort_hits(scored)[:top_k]
    return RankedList(hits=hits, origin=per_query_results[0].origin)


@dataclass(frozen=True)
class TemporalHit:
    pivot: KeyframeId
    score: float
    # one entry per stage after the first; None marks an absent extension
    chain: tuple[KeyframeId | None, ...]


@dataclass(frozen=True)
class TemporalResult:
    hits: tuple[TemporalHit, ...]


def temporal_fuse(stage_lists: list[RankedList], cfg: FusionConfig = FusionConfig()) -> TemporalResult:
    """Pivot-anchored chain scoring across n staged ranked lists.

    Each stage-1 hit is a pivot. Its score is 1/(C + r1) plus the best
    same-video forward chain through the later stages, where stage j adds
    1/(C + rj) only while every keyframe-index gap so far lies strictly
    inside (0, window). Maximization is exact via backward dynamic
    programming over stages.
    """
    if len(stage_lists) < 2:
        raise ValueError("temporal_fuse needs at least 2 stage lists")
    c = cfg.temporal_constant
    w = cfg.window
    n = len(stage_lists)

    # per stage, per video: list of (keyframe_index, reciprocal rank term, id)
    stages: list[dict[str, list[tuple[int, float, KeyframeId]]]] = []
    for rl in stage_lists:
        by_video: dict[str, list[tuple[int, float, KeyframeId]]] = {}
        for rank, (kid, _) in enumerate(rl.hits, 1):
            by_video.setdefault(kid.video_id, []).append(
                (kid.keyframe_index, 1.0 / (c + rank), kid)
            )
        stages.append(by_video)

    # best[j] maps candidate id -> (value, next id or None); filled back to front
    best: list[dict[KeyframeId, tuple[float, KeyframeId | None]]] = [
        {} for _ in range(n)
    ]
    for j in range(n - 1, 0, -1):
        for video, cands in stages[j].items():
            nxt = stages[j + 1].get(video, []) if j + 1 < n else []
            for idx, term, kid in cands:
                ext_val, ext_id = 0.0, None
                for idx2, _, kid2 in nxt:
                    if 0 < idx2 - idx < w:
                        val2 = best[j + 1][kid2][0]
                        if val2 > ext_val or (val2 == ext_val and (ext_id is None or kid2 < ext_id)):
                            ext_val, ext_id = val2, kid2
                best[j][kid] = (term + ext_val, ext_id)

    hits = []
    for rank, (pivot, _) in enumerate(stage_lists[0].hits, 1):
        score = 1.0 / (c + rank)
        ext_val, ext_id = 0.0, None
        for idx2, _, kid2 in stages[1].get(pivot.video_id, []):
            if 0 < idx2 - pivot.keyframe_index < w:
                val2 = best[1][kid2][0]
                if val2 > ext_val or (val2 == ext_val and (ext_id is None or kid2 < ext_id)):
                    ext_val, ext_id = val2, kid2
        score += ext_val

        chain: list[KeyframeId | None] = []
        cur = ext_id
        for j in range(1, n):
            chain.append(cur)
            cur = best[j][cur][1] if cur is not None else None
        hits.append(TemporalHit(pivot=pivot, score=score, chain=tuple(chain)))

    hits.sort(key=lambda h: (-h.score, h.pivot.sort_key))
    return TemporalResult(hits=tuple(hits[: cfg.top_k]))
