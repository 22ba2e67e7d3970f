"""Named embedding spaces with exact cosine top-k search and binary persistence."""

from __future__ import annotations

import struct

import numpy as np

from .errors import DimensionMismatch, DuplicateId, FormatError, ZeroVector
from .model import KeyframeId, RankedList

SPACE_MAGIC = b"EMS1"


class EmbeddingSpace:
    """Flat store of unit-norm float32 vectors with parallel keyframe ids.

    Mutated only during a single-writer build phase; searches afterwards are
    read-only and safe to run concurrently.
    """

    def __init__(self, name: str, dim: int):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.name = name
        self.dim = dim
        self.ids: list[KeyframeId] = []
        self._rows: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self._id_set: set[KeyframeId] = set()

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None or len(self._matrix) != len(self._rows):
            if self._rows:
                self._matrix = np.vstack(self._rows)
            else:
                self._matrix = np.empty((0, self.dim), dtype=np.float32)
        return self._matrix

    def add_vectors(self, entries: list[tuple[KeyframeId, np.ndarray]]) -> None:
        """Normalize and append vectors; rejects duplicates and zero vectors."""
        for kid, vec in entries:
            v = np.asarray(vec, dtype=np.float64)
            if v.shape != (self.dim,):
                raise DimensionMismatch(
                    f"vector of length {v.shape} added to {self.dim}-d space {self.name}"
                )
            norm = np.linalg.norm(v)
            if norm == 0.0:
                raise ZeroVector(f"zero vector for {kid}")
            if kid in self._id_set:
                raise DuplicateId(f"{kid} already present in space {self.name}")
            self._rows.append((v / norm).astype(np.float32))
            self.ids.append(kid)
            self._id_set.add(kid)
        self._matrix = None

    def search(self, query: np.ndarray, top_k: int) -> RankedList:
        """Exact top-k by cosine similarity (dot product of unit vectors)."""
        if top_k < 1:
            raise ValueError("top_k must be positive")
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.dim,):
            raise DimensionMismatch(
                f"query of shape {q.shape} against {self.dim}-d space {self.name}"
            )
        norm = np.linalg.norm(q)
        if norm == 0.0:
            raise ZeroVector("zero query vector")
        q = q / norm
        scores = np.clip(self.matrix.astype(np.float64) @ q, -1.0, 1.0)
        order = sorted(
            range(len(self.ids)),
            key=lambda i: (-scores[i], self.ids[i].sort_key),
        )[:top_k]
        hits = [(self.ids[i], float(scores[i])) for i in order]
        return RankedList(hits=hits, origin=self.name)


def save_space(space: EmbeddingSpace, path) -> None:
    """Write the EMS1 binary format (all integers little-endian)."""
    with open(path, "wb") as fh:
        fh.write(SPACE_MAGIC)
        fh.write(struct.pack("<II", space.dim, len(space)))
        mat = space.matrix
        for kid, row in zip(space.ids, mat):
            vid = kid.video_id.encode("utf-8")
            fh.write(struct.pack("<H", len(vid)))
            fh.write(vid)
            fh.write(
                struct.pack(
                    "<IIQ", kid.keyframe_index, kid.frame_number, kid.timestamp_ms
                )
            )
            fh.write(np.ascontiguousarray(row, dtype="<f4").tobytes())


def _read_exact(fh, n: int, path) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated space file {path}")
    return buf


def load_space(path, name: str | None = None) -> EmbeddingSpace:
    """Read an EMS1 file; loaded vectors are stored verbatim (bit-equal round trip)."""
    with open(path, "rb") as fh:
        if fh.read(4) != SPACE_MAGIC:
            raise FormatError(f"bad magic in space file {path}")
        dim, count = struct.unpack("<II", _read_exact(fh, 8, path))
        space = EmbeddingSpace(name=name or str(path), dim=dim)
        for _ in range(count):
            (vlen,) = struct.unpack("<H", _read_exact(fh, 2, path))
            vid = _read_exact(fh, vlen, path).decode("utf-8")
            kf_index, frame, ts = struct.unpack("<IIQ", _read_exact(fh, 16, path))
            row = np.frombuffer(_read_exact(fh, 4 * dim, path), dtype="<f4").copy()
            kid = KeyframeId(
                video_id=vid, keyframe_index=kf_index, frame_number=frame, timestamp_ms=ts
            )
            if kid in space._id_set:
                raise FormatError(f"duplicate id {kid} in space file {path}")
            space._rows.append(row)
            space.ids.append(kid)
            space._id_set.add(kid)
        if fh.read(1):
            raise FormatError(f"trailing bytes in space file {path}")
    return space
