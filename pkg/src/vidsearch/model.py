"""Core identity and ranking types exchanged between search and fusion modules."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class KeyframeId:
    """Identity of one keyframe: which video, which position, and where in time."""

    video_id: str
    keyframe_index: int
    frame_number: int = 0
    timestamp_ms: int = 0

    @property
    def sort_key(self) -> tuple[str, int]:
        # deterministic tie-break key used by every ranking operation
        return (self.video_id, self.keyframe_index)

    def __lt__(self, other: "KeyframeId") -> bool:
        return self.sort_key < other.sort_key


@dataclass
class RankedList:
    """Ordered hits with scores; the unit exchanged by all fusion operations.

    Scores must be non-increasing and ids unique. Rank of the hit at
    position i (0-based) is i + 1.
    """

    hits: list[tuple[KeyframeId, float]] = field(default_factory=list)
    origin: str = ""

    def __post_init__(self):
        seen = set()
        prev = None
        for kid, score in self.hits:
            if kid in seen:
                raise ValueError(f"duplicate id in RankedList: {kid}")
            seen.add(kid)
            if prev is not None and score > prev + 1e-12:
                raise ValueError("RankedList scores must be non-increasing")
            prev = score

    def __len__(self) -> int:
        return len(self.hits)

    def ids(self) -> list[KeyframeId]:
        return [kid for kid, _ in self.hits]


def sort_hits(scored: dict[KeyframeId, float]) -> list[tuple[KeyframeId, float]]:
    """Sort id->score map by score descending, ties by (video_id, keyframe_index)."""
    return sorted(scored.items(), key=lambda kv: (-kv[1], kv[0].sort_key))
