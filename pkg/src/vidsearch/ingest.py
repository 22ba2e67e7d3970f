"""Corpus loading: a JSON manifest binds videos, embedding spaces, and
metadata files into one validated, immutable in-memory corpus."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .embed_index import EmbeddingSpace, load_space
from .errors import ManifestError
from .grid_meta import (
    KeyframeRecord,
    MetadataCorpus,
    load_colors_file,
    load_detections_file,
    load_ocr_file,
)
from .model import KeyframeId


@dataclass(frozen=True)
class VideoInfo:
    video_id: str
    fps: float
    keyframe_count: int


@dataclass(frozen=True)
class Corpus:
    name: str
    videos: dict[str, VideoInfo]
    spaces: dict[str, EmbeddingSpace]
    metadata: MetadataCorpus
    keyframes: dict[tuple[str, int], KeyframeId]
    media_root: str

    def keyframe(self, video_id: str, keyframe_index: int) -> KeyframeId | None:
        return self.keyframes.get((video_id, keyframe_index))

    def media_path(self, video_id: str, keyframe_index: int) -> str:
        return os.path.join(self.media_root, video_id, f"{keyframe_index}.jpg")


def _fail(path, msg: str):
    raise ManifestError(f"{path}: {msg}")


def load_corpus(manifest_path) -> Corpus:
    """Parse and cross-validate a corpus manifest; fail-fast on any inconsistency."""
    manifest_path = os.path.abspath(manifest_path)
    base = os.path.dirname(manifest_path)
    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise ManifestError(f"{manifest_path}: cannot read ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{manifest_path}: bad JSON ({exc})") from exc

    def resolve(p: str) -> str:
        return p if os.path.isabs(p) else os.path.join(base, p)

    name = manifest.get("corpus_name", "corpus")

    videos: dict[str, VideoInfo] = {}
    for v in manifest.get("videos", []):
        vid = v.get("video_id")
        if not vid:
            _fail(manifest_path, "video without video_id")
        if vid in videos:
            _fail(manifest_path, f"duplicate video_id {vid!r}")
        fps = float(v.get("fps", 0))
        count = int(v.get("keyframe_count", 0))
        if fps <= 0 or count < 1:
            _fail(manifest_path, f"video {vid!r} needs positive fps and keyframe_count")
        videos[vid] = VideoInfo(video_id=vid, fps=fps, keyframe_count=count)
    if not videos:
        _fail(manifest_path, "manifest lists no videos")

    total = sum(v.keyframe_count for v in videos.values())

    space_entries = manifest.get("spaces", [])
    if not space_entries:
        _fail(manifest_path, "manifest lists no embedding spaces")
    spaces: dict[str, EmbeddingSpace] = {}
    keyframes: dict[tuple[str, int], KeyframeId] = {}
    for entry in space_entries:
        sname = entry.get("name")
        vector_file = resolve(entry.get("vector_file", ""))
        if not sname:
            _fail(manifest_path, "space without name")
        if sname in spaces:
            _fail(manifest_path, f"duplicate space {sname!r}")
        if not os.path.isfile(vector_file):
            _fail(vector_file, f"vector file for space {sname!r} missing")
        space = load_space(vector_file, name=sname)
        if space.dim != int(entry.get("dim", space.dim)):
            _fail(vector_file, f"space {sname!r} dim {space.dim} != manifest dim {entry.get('dim')}")
        if len(space) != total:
            _fail(
                vector_file,
                f"space {sname!r} holds {len(space)} rows but corpus has {total} keyframes",
            )
        for kid in space.ids:
            if kid.video_id not in videos:
                _fail(vector_file, f"space {sname!r} references unknown video {kid.video_id!r}")
            if kid.keyframe_index >= videos[kid.video_id].keyframe_count:
                _fail(
                    vector_file,
                    f"space {sname!r} keyframe_index {kid.keyframe_index} out of range "
                    f"for video {kid.video_id!r}",
                )
            key = (kid.video_id, kid.keyframe_index)
            if key in keyframes:
                if keyframes[key] != kid:
                    _fail(
                        vector_file,
                        f"space {sname!r} disagrees on keyframe identity for {key}",
                    )
            else:
                keyframes[key] = kid
        spaces[sname] = space

    if len(keyframes) != total:
        _fail(manifest_path, "embedding rows do not cover every (video, keyframe_index)")

    # keyframe_index must increase with frame_number inside each video
    for vid in videos:
        ordered = sorted(
            (kid for kid in keyframes.values() if kid.video_id == vid),
            key=lambda k: k.keyframe_index,
        )
        for a, b in zip(ordered, ordered[1:]):
            if b.frame_number <= a.frame_number:
                _fail(
                    manifest_path,
                    f"video {vid!r}: frame_number not increasing with keyframe_index",
                )

    records = {
        kid: KeyframeRecord(id=kid) for kid in keyframes.values()
    }

    det_file = manifest.get("detections_file")
    if det_file:
        det_file = resolve(det_file)
        if not os.path.isfile(det_file):
            _fail(det_file, "detections file missing")
        for kid, (tokens, tags) in load_detections_file(det_file, keyframes).items():
            records[kid].grid_tokens = tokens
            records[kid].tag_string = tags

    colors_file = manifest.get("colors_file")
    if colors_file:
        colors_file = resolve(colors_file)
        if not os.path.isfile(colors_file):
            _fail(colors_file, "colors file missing")
        for kid, tokens in load_colors_file(colors_file, keyframes).items():
            records[kid].color_tokens = tokens

    ocr_file = manifest.get("ocr_file")
    if ocr_file:
        ocr_file = resolve(ocr_file)
        if not os.path.isfile(ocr_file):
            _fail(ocr_file, "ocr file missing")
        for kid, text in load_ocr_file(ocr_file, keyframes).items():
            records[kid].ocr_text = text

    media_root = resolve(manifest.get("media_root", "media"))
    if not os.path.isdir(media_root):
        _fail(media_root, "media_root is not a directory")
    for (vid, idx) in keyframes:
        img = os.path.join(media_root, vid, f"{idx}.jpg")
        if not os.path.isfile(img):
            _fail(img, f"keyframe image missing for ({vid}, {idx})")

    ordered_records = [
        records[kid]
        for kid in sorted(records, key=lambda k: (k.video_id, k.keyframe_index))
    ]
    return Corpus(
        name=name,
        videos=videos,
        spaces=spaces,
        metadata=MetadataCorpus(ordered_records),
        keyframes=keyframes,
        media_root=media_root,
    )
