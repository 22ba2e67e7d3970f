"""Spatial grid metadata: 7x7 codloc/codclass tokens, color cells, fuzzy
AND/OR grid queries, and tag/OCR text search."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import ManifestError, UnknownColorTerm
from .model import KeyframeId, RankedList, sort_hits

GRID_SIZE = 7
COVERAGE_MIN = 0.15
DEFAULT_FUZZINESS = 0.25

COLOR_TERMS = (
    "white", "black", "red", "green", "yellow", "blue",
    "brown", "purple", "pink", "orange", "gray",
)
EMPTY_CELL = ""

TOKEN_RE = re.compile(r"^([a-g])([0-6])([a-z0-9_]+)$")


def codloc(row: int, col: int) -> str:
    """Cell address: letter a-g for the row (top = a), digit 0-6 for the column."""
    if not (0 <= row < GRID_SIZE and 0 <= col < GRID_SIZE):
        raise ValueError(f"cell out of range: ({row}, {col})")
    return chr(ord("a") + row) + str(col)


def parse_token(token: str) -> tuple[int, int, str]:
    m = TOKEN_RE.match(token)
    if not m:
        raise ValueError(f"bad grid token: {token!r}")
    return ord(m.group(1)) - ord("a"), int(m.group(2)), m.group(3)


def normalize_class(class_name: str) -> str:
    return "_".join(class_name.lower().split())


@dataclass(frozen=True)
class Detection:
    class_name: str
    confidence: float
    bbox: tuple[float, float, float, float]  # normalized (x1, y1, x2, y2)

    def __post_init__(self):
        x1, y1, x2, y2 = self.bbox
        if not (0.0 <= x1 < x2 <= 1.0 and 0.0 <= y1 < y2 <= 1.0):
            raise ValueError(f"bbox must be well-ordered in [0,1]: {self.bbox}")
        if not self.class_name:
            raise ValueError("class_name must be non-empty")


@dataclass
class KeyframeRecord:
    id: KeyframeId
    grid_tokens: set[str] = field(default_factory=set)
    color_tokens: set[str] = field(default_factory=set)
    tag_string: str = ""
    ocr_text: str = ""


class GridOperator(str, Enum):
    AND = "AND"
    OR = "OR"


@dataclass(frozen=True)
class GridQuery:
    constraints: tuple[tuple[str, str], ...]  # (codloc cell, class name)
    operator: GridOperator = GridOperator.AND
    fuzziness: float = DEFAULT_FUZZINESS

    def __post_init__(self):
        if not self.constraints:
            raise ValueError("GridQuery needs at least one constraint")
        for cell, cls in self.constraints:
            if not re.match(r"^[a-g][0-6]$", cell):
                raise ValueError(f"bad cell address: {cell!r}")
            if not cls:
                raise ValueError("constraint class must be non-empty")
        if not (0.0 <= self.fuzziness <= 1.0):
            raise ValueError("fuzziness must lie in [0, 1]")


def encode_detections(dets: list[Detection]) -> tuple[set[str], str]:
    """Emit codloc||codclass tokens and the sorted per-class count tag string.

    A detection marks every cell its box covers by at least 15% of the cell
    area, and always the cell holding the box center.
    """
    tokens: set[str] = set()
    counts: dict[str, int] = {}
    cell = 1.0 / GRID_SIZE
    for det in dets:
        cls = normalize_class(det.class_name)
        counts[cls] = counts.get(cls, 0) + 1
        x1, y1, x2, y2 = det.bbox
        for row in range(GRID_SIZE):
            cy1, cy2 = row * cell, (row + 1) * cell
            for col in range(GRID_SIZE):
                cx1, cx2 = col * cell, (col + 1) * cell
                ix = max(0.0, min(x2, cx2) - max(x1, cx1))
                iy = max(0.0, min(y2, cy2) - max(y1, cy1))
                if ix * iy >= COVERAGE_MIN * cell * cell:
                    tokens.add(codloc(row, col) + cls)
        center_row = min(GRID_SIZE - 1, int((y1 + y2) / 2 * GRID_SIZE))
        center_col = min(GRID_SIZE - 1, int((x1 + x2) / 2 * GRID_SIZE))
        tokens.add(codloc(center_row, center_col) + cls)
    tag_string = " ".join(f"{cls}{n}" for cls, n in sorted(counts.items()))
    return tokens, tag_string


def encode_colors(cell_labels: list[list[str]]) -> set[str]:
    """Token codloc||color per non-empty cell of a 7x7 color-label array."""
    if len(cell_labels) != GRID_SIZE or any(len(r) != GRID_SIZE for r in cell_labels):
        raise ValueError("cell_labels must be a 7x7 array")
    tokens: set[str] = set()
    for row in range(GRID_SIZE):
        for col in range(GRID_SIZE):
            label = cell_labels[row][col]
            if label == EMPTY_CELL:
                continue
            if label not in COLOR_TERMS:
                raise UnknownColorTerm(f"unknown color term: {label!r}")
            tokens.add(codloc(row, col) + label)
    return tokens


def rgb_to_color_term(rgb: tuple[int, int, int]) -> str:
    """Nearest of the 11 fixed anchor RGB values; demo-corpus plumbing only."""
    anchors = {
        "white": (255, 255, 255), "black": (0, 0, 0), "red": (220, 30, 30),
        "green": (40, 160, 60), "yellow": (235, 220, 50), "blue": (40, 80, 220),
        "brown": (140, 90, 40), "purple": (130, 50, 160), "pink": (240, 150, 190),
        "orange": (245, 140, 30), "gray": (128, 128, 128),
    }
    return min(
        anchors,
        key=lambda t: sum((a - b) ** 2 for a, b in zip(anchors[t], rgb)),
    )


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def fuzzy_score(a: str, b: str) -> float:
    """Normalized edit similarity in [0,1] after lowercasing."""
    a, b = a.lower(), b.lower()
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


class MetadataCorpus:
    """Immutable record store with a codloc inverted index for grid queries."""

    def __init__(self, records: list[KeyframeRecord]):
        self.records = list(records)
        self.by_id = {r.id: r for r in self.records}
        if len(self.by_id) != len(self.records):
            raise ValueError("duplicate keyframe ids in metadata corpus")
        # codloc -> record index -> set of codclass at that cell
        self._cells: dict[str, dict[int, set[str]]] = {}
        for idx, rec in enumerate(self.records):
            for token in rec.grid_tokens | rec.color_tokens:
                row, col, cls = parse_token(token)
                self._cells.setdefault(codloc(row, col), {}).setdefault(idx, set()).add(cls)

    def __len__(self) -> int:
        return len(self.records)

    def grid_search(self, q: GridQuery, top_k: int) -> RankedList:
        """Fuzzy spatial constraint search with AND/OR semantics."""
        threshold = 1.0 - q.fuzziness
        # per record: list of matched-constraint qualities
        qualities: dict[int, list[float]] = {}
        for cell, cls in q.constraints:
            at_cell = self._cells.get(cell, {})
            for idx, classes in at_cell.items():
                best = max(fuzzy_score(cls, have) for have in classes)
                if best >= threshold:
                    qualities.setdefault(idx, []).append(best)
        n_constraints = len(q.constraints)
        scored: dict[KeyframeId, float] = {}
        for idx, quals in qualities.items():
            if q.operator is GridOperator.AND and len(quals) < n_constraints:
                continue
            scored[self.records[idx].id] = sum(quals)
        hits = sort_hits(scored)[:top_k]
        return RankedList(hits=hits, origin="grid")

    def text_search(
        self, field_name: str, query: str, top_k: int,
        fuzziness: float = DEFAULT_FUZZINESS,
    ) -> RankedList:
        """Fuzzy token search over OCR text or the tag string.

        field_name: "ocr" or "tags". Whole-query substring match scores 1.0;
        otherwise the mean over query tokens of the best per-token similarity,
        with below-threshold tokens contributing 0.
        """
        if field_name not in ("ocr", "tags"):
            raise ValueError("field must be 'ocr' or 'tags'")
        q = query.lower().strip()
        q_tokens = q.split()
        if not q_tokens:
            raise ValueError("empty text query")
        threshold = 1.0 - fuzziness
        scored: dict[KeyframeId, float] = {}
        for rec in self.records:
            text = (rec.ocr_text if field_name == "ocr" else rec.tag_string).lower()
            if not text:
                continue
            if q in text:
                scored[rec.id] = 1.0
                continue
            field_tokens = text.split()
            total = 0.0
            for qt in q_tokens:
                best = max(fuzzy_score(qt, ft) for ft in field_tokens)
                if best >= threshold:
                    total += best
            score = total / len(q_tokens)
            if score > 0.0:
                scored[rec.id] = score
        hits = sort_hits(scored)[:top_k]
        return RankedList(hits=hits, origin=field_name)


def _require(cond: bool, path, line_no: int, msg: str):
    if not cond:
        raise ManifestError(f"{path}:{line_no}: {msg}")


def read_jsonl(path):
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{line_no}: bad JSON ({exc})") from exc


def load_detections_file(path, known: dict[tuple[str, int], KeyframeId]) -> dict[KeyframeId, tuple[set[str], str]]:
    """JSON-lines: {"video_id", "keyframe_index", "detections": [...]}."""
    out = {}
    for line_no, obj in read_jsonl(path):
        key = (obj.get("video_id"), obj.get("keyframe_index"))
        _require(key in known, path, line_no, f"unknown keyframe {key}")
        dets = []
        for d in obj.get("detections", []):
            dets.append(
                Detection(
                    class_name=d["class"],
                    confidence=float(d.get("confidence", 1.0)),
                    bbox=tuple(d["bbox"]),
                )
            )
        out[known[key]] = encode_detections(dets)
    return out


def load_colors_file(path, known: dict[tuple[str, int], KeyframeId]) -> dict[KeyframeId, set[str]]:
    """JSON-lines: {"video_id", "keyframe_index", "cells": 49 strings row-major}."""
    out = {}
    for line_no, obj in read_jsonl(path):
        key = (obj.get("video_id"), obj.get("keyframe_index"))
        _require(key in known, path, line_no, f"unknown keyframe {key}")
        cells = obj.get("cells", [])
        _require(len(cells) == GRID_SIZE * GRID_SIZE, path, line_no, "need 49 cells")
        grid = [cells[r * GRID_SIZE : (r + 1) * GRID_SIZE] for r in range(GRID_SIZE)]
        try:
            out[known[key]] = encode_colors(grid)
        except UnknownColorTerm as exc:
            raise ManifestError(f"{path}:{line_no}: {exc}") from exc
    return out


def load_ocr_file(path, known: dict[tuple[str, int], KeyframeId]) -> dict[KeyframeId, str]:
    """JSON-lines: {"video_id", "keyframe_index", "text"}."""
    out = {}
    for line_no, obj in read_jsonl(path):
        key = (obj.get("video_id"), obj.get("keyframe_index"))
        _require(key in known, path, line_no, f"unknown keyframe {key}")
        out[known[key]] = str(obj.get("text", ""))
    return out
