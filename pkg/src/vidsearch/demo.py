"""Seeded synthetic demo corpus so the full system runs with no external
models: embeddings, detections, colors, OCR, placeholder images, and a
bimodal score file with its analytic threshold in a sidecar."""

from __future__ import annotations

import json
import os

import numpy as np
from PIL import Image

from .embed_index import EmbeddingSpace, save_space
from .grid_meta import COLOR_TERMS
from .model import KeyframeId
from .providers import MockEmbeddingProvider
from .threshold import (
    MixtureComponent,
    MixtureModel,
    expected_error,
    gaussian_intersections,
)

DEFAULT_MOCK_SEED = 7
DEMO_SPACES = (("clip_demo", 64), ("beit_demo", 32))

# the planted cross-modal temporal scenario: a text query hits keyframe 10,
# the OCR phrase appears three keyframes later in the same video
PLANT_VIDEO = "video_000"
PLANT_TEXT_KEYFRAME = 10
PLANT_TEXT = "a person cutting mushrooms"
PLANT_OCR_KEYFRAME = 13
PLANT_OCR_TEXT = "cu nang"

OBJECT_VOCAB = (
    "person", "car", "dog", "bicycle", "tree", "chair", "phone",
    "bottle", "cup", "laptop", "book", "boat",
)
OCR_VOCAB = (
    "kitchen", "news", "sport", "music", "weather",
    "travel", "cooking", "market", "studio",
)

SCORE_MIX = {
    "weights": (0.7, 0.3),
    "means": (0.1, 0.9),
    "sigmas": (0.05, 0.08),
    "n": 5000,
}


def _score_mixture_model() -> MixtureModel:
    w, mu, sg = SCORE_MIX["weights"], SCORE_MIX["means"], SCORE_MIX["sigmas"]
    return MixtureModel(
        components=(
            MixtureComponent(weight=w[0], mean=mu[0], sigma=sg[0]),
            MixtureComponent(weight=w[1], mean=mu[1], sigma=sg[1]),
        )
    )


def analytic_bayes_threshold(model: MixtureModel) -> float:
    roots = gaussian_intersections(model)
    candidates = roots or [model.low.mean, model.high.mean]
    return min(candidates, key=lambda t: (expected_error(model, t), t))


def generate_demo_corpus(
    out_dir: str,
    videos: int = 20,
    keyframes: int = 30,
    seed: int = 0,
) -> str:
    """Write a complete corpus under out_dir; returns the manifest path.

    Deterministic: same arguments produce bit-identical trees.
    """
    rng = np.random.default_rng(seed)
    os.makedirs(out_dir, exist_ok=True)
    media_root = os.path.join(out_dir, "media")

    video_ids = [f"video_{i:03d}" for i in range(videos)]
    fps = 25.0
    ids: list[KeyframeId] = []
    for vid in video_ids:
        for idx in range(keyframes):
            frame = idx * 30
            ids.append(
                KeyframeId(
                    video_id=vid,
                    keyframe_index=idx,
                    frame_number=frame,
                    timestamp_ms=int(round(frame / fps * 1000)),
                )
            )

    embedder = MockEmbeddingProvider(dims=dict(DEMO_SPACES), seed=DEFAULT_MOCK_SEED)
    space_files = []
    for sname, dim in DEMO_SPACES:
        space = EmbeddingSpace(name=sname, dim=dim)
        entries = []
        for kid in ids:
            if kid.video_id == PLANT_VIDEO and kid.keyframe_index == PLANT_TEXT_KEYFRAME:
                vec = embedder.embed(PLANT_TEXT, sname)
            else:
                vec = rng.standard_normal(dim)
            entries.append((kid, vec))
        space.add_vectors(entries)
        fname = f"space_{sname}.ems"
        save_space(space, os.path.join(out_dir, fname))
        space_files.append({"name": sname, "dim": dim, "vector_file": fname})

    det_path = os.path.join(out_dir, "detections.jsonl")
    with open(det_path, "w", encoding="utf-8") as fh:
        for kid in ids:
            dets = []
            for _ in range(int(rng.integers(0, 4))):
                cls = OBJECT_VOCAB[int(rng.integers(len(OBJECT_VOCAB)))]
                x1 = float(rng.uniform(0.0, 0.75))
                y1 = float(rng.uniform(0.0, 0.75))
                x2 = float(min(1.0, x1 + rng.uniform(0.05, 0.25)))
                y2 = float(min(1.0, y1 + rng.uniform(0.05, 0.25)))
                dets.append(
                    {
                        "class": cls,
                        "confidence": round(float(rng.uniform(0.5, 1.0)), 4),
                        "bbox": [round(x1, 6), round(y1, 6), round(x2, 6), round(y2, 6)],
                    }
                )
            if kid.video_id == PLANT_VIDEO and kid.keyframe_index == PLANT_TEXT_KEYFRAME:
                # a person filling grid cell c4 (row 2, col 4)
                dets.append(
                    {
                        "class": "person",
                        "confidence": 0.99,
                        "bbox": [4 / 7, 2 / 7, 5 / 7, 3 / 7],
                    }
                )
            fh.write(
                json.dumps(
                    {
                        "video_id": kid.video_id,
                        "keyframe_index": kid.keyframe_index,
                        "detections": dets,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )

    colors_path = os.path.join(out_dir, "colors.jsonl")
    with open(colors_path, "w", encoding="utf-8") as fh:
        for kid in ids:
            cells = []
            for _ in range(49):
                if rng.random() < 0.3:
                    cells.append("")
                else:
                    cells.append(COLOR_TERMS[int(rng.integers(len(COLOR_TERMS)))])
            fh.write(
                json.dumps(
                    {
                        "video_id": kid.video_id,
                        "keyframe_index": kid.keyframe_index,
                        "cells": cells,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )

    ocr_path = os.path.join(out_dir, "ocr.jsonl")
    with open(ocr_path, "w", encoding="utf-8") as fh:
        for kid in ids:
            if kid.video_id == PLANT_VIDEO and kid.keyframe_index == PLANT_OCR_KEYFRAME:
                text = PLANT_OCR_TEXT
            elif rng.random() < 0.2:
                k = int(rng.integers(1, 4))
                text = " ".join(
                    OCR_VOCAB[int(rng.integers(len(OCR_VOCAB)))] for _ in range(k)
                )
            else:
                continue
            fh.write(
                json.dumps(
                    {
                        "video_id": kid.video_id,
                        "keyframe_index": kid.keyframe_index,
                        "text": text,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )

    for kid in ids:
        vdir = os.path.join(media_root, kid.video_id)
        os.makedirs(vdir, exist_ok=True)
        rgb = tuple(int(c) for c in rng.integers(0, 256, size=3))
        img = Image.new("RGB", (48, 27), rgb)
        img.save(os.path.join(vdir, f"{kid.keyframe_index}.jpg"), quality=85)

    # bimodal score stream + analytic sidecar for threshold verification
    srng = np.random.default_rng(seed + 1)
    w, mu, sg, n = (
        SCORE_MIX["weights"],
        SCORE_MIX["means"],
        SCORE_MIX["sigmas"],
        SCORE_MIX["n"],
    )
    comp = srng.random(n) < w[1]
    samples = np.where(
        comp,
        srng.normal(mu[1], sg[1], n),
        srng.normal(mu[0], sg[0], n),
    )
    scores_path = os.path.join(out_dir, "scores.txt")
    with open(scores_path, "w", encoding="utf-8") as fh:
        fh.write("# synthetic shot-boundary scores\n")
        for s in samples:
            fh.write(f"{s:.8f}\n")
    with open(os.path.join(out_dir, "scores_meta.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {
                "weights": list(w),
                "means": list(mu),
                "sigmas": list(sg),
                "n": n,
                "bayes_threshold": analytic_bayes_threshold(_score_mixture_model()),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")

    manifest = {
        "corpus_name": f"demo_{seed}",
        "videos": [
            {"video_id": vid, "fps": fps, "keyframe_count": keyframes}
            for vid in video_ids
        ],
        "spaces": space_files,
        "detections_file": "detections.jsonl",
        "colors_file": "colors.jsonl",
        "ocr_file": "ocr.jsonl",
        "media_root": "media",
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path
