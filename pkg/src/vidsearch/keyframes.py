"""Per-shot keyframe exemplar selection: K-Means over frame feature vectors,
then the centroid-nearest member frame of each cluster."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, FormatError

FEATURE_MAGIC = b"KFV1"
DEFAULT_K = 3
DEFAULT_MAX_ITER = 100


@dataclass(frozen=True)
class FeatureVector:
    frame_number: int
    values: tuple[float, ...]


@dataclass(frozen=True)
class Clustering:
    centroids: np.ndarray          # (k', D)
    assignment: dict[int, int]     # frame_number -> cluster id
    inertia: float


def _canonicalize(features: list[FeatureVector]) -> tuple[np.ndarray, list[int]]:
    if not features:
        raise EmptyInput("no feature vectors")
    ordered = sorted(features, key=lambda f: f.frame_number)
    frames = [f.frame_number for f in ordered]
    data = np.asarray([f.values for f in ordered], dtype=np.float64)
    if not np.all(np.isfinite(data)):
        raise ValueError("feature values must be finite")
    return data, frames


def _kmeanspp_init(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(data)
    centroids = np.empty((k, data.shape[1]))
    first = rng.integers(n)
    centroids[0] = data[first]
    d2 = ((data - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centroids[j] = data[idx]
        d2 = np.minimum(d2, ((data - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(
    features: list[FeatureVector],
    k: int = DEFAULT_K,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Clustering:
    """Lloyd's algorithm with seeded k-means++ init and empty-cluster repair.

    k is capped at the number of distinct vectors.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    data, frames = _canonicalize(features)
    distinct = len(np.unique(data, axis=0))
    k = min(k, distinct)

    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(data, k, rng)

    labels = None
    for _ in range(max_iter):
        d2 = ((data[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)

        # repair empty clusters: move the globally farthest point in
        for c in range(k):
            if not np.any(new_labels == c):
                far = int(np.argmax(d2[np.arange(len(data)), new_labels]))
                new_labels[far] = c
                centroids[c] = data[far]

        if labels is not None and np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
        for c in range(k):
            centroids[c] = data[labels == c].mean(axis=0)

    d2 = ((data - centroids[labels]) ** 2).sum(axis=1)
    inertia = float(d2.sum())
    assignment = {frames[i]: int(labels[i]) for i in range(len(frames))}
    return Clustering(centroids=centroids, assignment=assignment, inertia=inertia)


def select_exemplars(
    features: list[FeatureVector], k: int = DEFAULT_K, seed: int = 0
) -> list[int]:
    """Centroid-nearest member frame per cluster, sorted by frame number.

    Ties on distance break toward the smaller frame number.
    """
    clustering = kmeans(features, k=k, seed=seed)
    data, frames = _canonicalize(features)
    by_cluster: dict[int, tuple[float, int]] = {}
    for i, frame in enumerate(frames):
        c = clustering.assignment[frame]
        dist = float(((data[i] - clustering.centroids[c]) ** 2).sum())
        best = by_cluster.get(c)
        if best is None:
            by_cluster[c] = (dist, frame)
            continue
        # distances equal up to fp noise count as a tie -> smaller frame wins
        tol = 1e-9 * (1.0 + max(dist, best[0]))
        if dist < best[0] - tol or (abs(dist - best[0]) <= tol and frame < best[1]):
            by_cluster[c] = (dist, frame)
    return sorted(frame for _, frame in by_cluster.values())


def write_features(path, features: list[FeatureVector]) -> None:
    """Binary feature stream: magic KFV1, u32 dim, repeated (u32 frame, f32*dim)."""
    if not features:
        raise EmptyInput("no feature vectors to write")
    dim = len(features[0].values)
    with open(path, "wb") as fh:
        fh.write(FEATURE_MAGIC)
        fh.write(struct.pack("<I", dim))
        for f in features:
            if len(f.values) != dim:
                raise ValueError("inconsistent feature dimension")
            fh.write(struct.pack("<I", f.frame_number))
            fh.write(np.asarray(f.values, dtype="<f4").tobytes())


def read_features(path) -> list[FeatureVector]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FEATURE_MAGIC:
            raise FormatError(f"bad feature file magic in {path}")
        head = fh.read(4)
        if len(head) != 4:
            raise FormatError(f"truncated feature file {path}")
        (dim,) = struct.unpack("<I", head)
        record = 4 + 4 * dim
        out = []
        while True:
            chunk = fh.read(record)
            if not chunk:
                break
            if len(chunk) != record:
                raise FormatError(f"truncated feature record in {path}")
            (frame,) = struct.unpack("<I", chunk[:4])
            vals = np.frombuffer(chunk[4:], dtype="<f4")
            out.append(FeatureVector(frame_number=frame, values=tuple(float(v) for v in vals)))
    if not out:
        raise FormatError(f"feature file {path} holds no records")
    return out
