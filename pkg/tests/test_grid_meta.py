"""Grid metadata tests: token encoding vs a rasterization oracle, fuzzy
matching, and AND/OR grid queries vs exhaustive scans."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vidsearch.errors import UnknownColorTerm
from vidsearch.grid_meta import (
    COLOR_TERMS,
    GRID_SIZE,
    Detection,
    GridOperator,
    GridQuery,
    KeyframeRecord,
    MetadataCorpus,
    codloc,
    encode_colors,
    encode_detections,
    fuzzy_score,
    levenshtein,
    parse_token,
)
from vidsearch.model import KeyframeId


def kid(i):
    return KeyframeId(video_id=f"v{i:03d}", keyframe_index=i)


def raster_tokens(dets, raster=1000):
    """Independent pixel-counting oracle for the 15%-coverage + center rule."""
    tokens = set()
    for det in dets:
        cls = det.class_name.lower().replace(" ", "_")
        x1, y1, x2, y2 = det.bbox
        cover = np.zeros((GRID_SIZE, GRID_SIZE), dtype=np.int64)
        total = np.zeros((GRID_SIZE, GRID_SIZE), dtype=np.int64)
        xs = (np.arange(raster) + 0.5) / raster
        ys = (np.arange(raster) + 0.5) / raster
        col_of = np.minimum((xs * GRID_SIZE).astype(int), GRID_SIZE - 1)
        row_of = np.minimum((ys * GRID_SIZE).astype(int), GRID_SIZE - 1)
        in_x = (xs >= x1) & (xs < x2)
        in_y = (ys >= y1) & (ys < y2)
        for r in range(GRID_SIZE):
            rows = row_of == r
            for c in range(GRID_SIZE):
                cols = col_of == c
                total[r, c] = rows.sum() * cols.sum()
                cover[r, c] = (rows & in_y).sum() * (cols & in_x).sum()
        for r in range(GRID_SIZE):
            for c in range(GRID_SIZE):
                if cover[r, c] / total[r, c] >= 0.15:
                    tokens.add(codloc(r, c) + cls)
        cr = min(GRID_SIZE - 1, int((y1 + y2) / 2 * GRID_SIZE))
        cc = min(GRID_SIZE - 1, int((x1 + x2) / 2 * GRID_SIZE))
        tokens.add(codloc(cr, cc) + cls)
    return tokens


class TestEncodeDetections:
    def test_single_cell_box(self):
        # bbox exactly covering row 2, col 4
        det = Detection("person", 0.9, (4 / 7, 2 / 7, 5 / 7, 3 / 7))
        tokens, tags = encode_detections([det])
        assert tokens == {"c4person"}
        assert tags == "person1"

    def test_full_frame_box(self):
        tokens, tags = encode_detections([Detection("car", 0.8, (0.0, 0.0, 1.0, 1.0))])
        assert len(tokens) == 49
        assert tags == "car1"

    def test_tag_counts_sorted(self):
        dets = [
            Detection("person", 0.9, (0.1, 0.1, 0.3, 0.3)),
            Detection("car", 0.9, (0.5, 0.5, 0.7, 0.7)),
            Detection("person", 0.9, (0.6, 0.1, 0.8, 0.3)),
        ]
        _, tags = encode_detections(dets)
        assert tags == "car1 person2"

    def test_class_name_normalization(self):
        tokens, tags = encode_detections(
            [Detection("Traffic Light", 0.9, (0.0, 0.0, 0.1, 0.1))]
        )
        assert tags == "traffic_light1"
        assert all(t.endswith("traffic_light") for t in tokens)

    def test_empty_input(self):
        assert encode_detections([]) == (set(), "")

    def test_center_cell_always_present(self):
        det = Detection("dot", 0.9, (0.49, 0.49, 0.51, 0.51))
        tokens, _ = encode_detections([det])
        assert codloc(3, 3) + "dot" in tokens

    def test_matches_rasterization_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            x1 = rng.uniform(0, 0.9)
            y1 = rng.uniform(0, 0.9)
            x2 = min(1.0, x1 + rng.uniform(0.02, 0.6))
            y2 = min(1.0, y1 + rng.uniform(0.02, 0.6))
            det = Detection("obj", 0.5, (x1, y1, x2, y2))
            got, _ = encode_detections([det])
            assert got == raster_tokens([det])

    def test_tokens_parse_back(self):
        det = Detection("person", 0.9, (0.1, 0.2, 0.9, 0.8))
        tokens, _ = encode_detections([det])
        for t in tokens:
            row, col, cls = parse_token(t)
            assert 0 <= row < GRID_SIZE and 0 <= col < GRID_SIZE
            assert cls == "person"


class TestEncodeColors:
    def test_all_blue(self):
        grid = [["blue"] * 7 for _ in range(7)]
        tokens = encode_colors(grid)
        assert len(tokens) == 49
        assert "a0blue" in tokens and "g6blue" in tokens

    def test_all_empty(self):
        assert encode_colors([[""] * 7 for _ in range(7)]) == set()

    def test_unknown_term(self):
        grid = [[""] * 7 for _ in range(7)]
        grid[0][0] = "cyan"
        with pytest.raises(UnknownColorTerm):
            encode_colors(grid)


class TestFuzzyScore:
    def test_hand_computed(self):
        assert fuzzy_score("person", "persn") == pytest.approx(1 - 1 / 6)

    def test_identity(self):
        assert fuzzy_score("car", "car") == 1.0

    def test_total_substitution(self):
        assert fuzzy_score("a", "b") == 0.0

    def test_empty_vs_empty(self):
        assert fuzzy_score("", "") == 1.0

    def test_case_insensitive(self):
        assert fuzzy_score("Person", "PERSON") == 1.0

    @given(st.text(max_size=12), st.text(max_size=12))
    @settings(max_examples=200, deadline=None)
    def test_bounds_and_symmetry(self, a, b):
        s = fuzzy_score(a, b)
        assert 0.0 <= s <= 1.0
        assert s == fuzzy_score(b, a)

    @given(st.text(min_size=1, max_size=10))
    @settings(max_examples=100, deadline=None)
    def test_self_score_one(self, a):
        assert fuzzy_score(a, a) == 1.0

    def test_levenshtein_known_values(self):
        assert levenshtein("kitten", "sitting") == 3
        assert levenshtein("", "abc") == 3
        assert levenshtein("flaw", "lawn") == 2


def make_corpus(rng, n=500):
    classes = ["person", "car", "dog", "tree", "bicycle", "chair"]
    words = ["hello", "market", "kitchen", "news", "cu", "nang", "sport"]
    records = []
    for i in range(n):
        dets = []
        for _ in range(int(rng.integers(0, 4))):
            x1, y1 = rng.uniform(0, 0.8, 2)
            dets.append(
                Detection(
                    classes[int(rng.integers(len(classes)))],
                    0.9,
                    (float(x1), float(y1), float(min(1, x1 + 0.2)), float(min(1, y1 + 0.2))),
                )
            )
        tokens, tags = encode_detections(dets)
        ocr = " ".join(
            words[int(rng.integers(len(words)))] for _ in range(int(rng.integers(0, 4)))
        )
        records.append(
            KeyframeRecord(id=kid(i), grid_tokens=tokens, tag_string=tags, ocr_text=ocr)
        )
    return MetadataCorpus(records)


def oracle_grid_search(records, q, top_k):
    """Exhaustive scan reimplementation of the grid query contract."""
    threshold = 1.0 - q.fuzziness
    scored = {}
    for rec in records:
        quals = []
        for cell, cls in q.constraints:
            best = 0.0
            for token in rec.grid_tokens | rec.color_tokens:
                if token[:2] != cell:
                    continue
                best = max(best, fuzzy_score(cls, token[2:]))
            if best >= threshold:
                quals.append(best)
        if q.operator is GridOperator.AND:
            if len(quals) == len(q.constraints):
                scored[rec.id] = sum(quals)
        elif quals:
            scored[rec.id] = sum(quals)
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0].sort_key))
    return ranked[:top_k]


class TestGridSearch:
    def test_exact_match(self):
        rec = KeyframeRecord(id=kid(0), grid_tokens={"c4person"})
        corpus = MetadataCorpus([rec])
        q = GridQuery(constraints=(("c4", "person"),))
        ranked = corpus.grid_search(q, top_k=10)
        assert ranked.hits == [(rec.id, 1.0)]

    def test_and_or_semantics(self):
        rec = KeyframeRecord(id=kid(0), grid_tokens={"c4person"})
        corpus = MetadataCorpus([rec])
        both = (("c4", "person"), ("a0", "car"))
        assert corpus.grid_search(GridQuery(constraints=both), 10).hits == []
        or_hits = corpus.grid_search(
            GridQuery(constraints=both, operator=GridOperator.OR), 10
        ).hits
        assert or_hits == [(rec.id, 1.0)]

    def test_fuzzy_class_match(self):
        rec = KeyframeRecord(id=kid(0), grid_tokens={"c4person"})
        corpus = MetadataCorpus([rec])
        hits = corpus.grid_search(GridQuery(constraints=(("c4", "persn"),)), 10).hits
        assert hits == [(rec.id, pytest.approx(1 - 1 / 6))]

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(55)
        corpus = make_corpus(rng)
        cells = [codloc(r, c) for r in range(7) for c in range(7)]
        classes = ["person", "car", "dog", "tre", "chair", "persn"]
        for _ in range(50):
            n_constraints = int(rng.integers(1, 4))
            constraints = tuple(
                (
                    cells[int(rng.integers(len(cells)))],
                    classes[int(rng.integers(len(classes)))],
                )
                for _ in range(n_constraints)
            )
            op = GridOperator.AND if rng.random() < 0.5 else GridOperator.OR
            q = GridQuery(constraints=constraints, operator=op)
            got = corpus.grid_search(q, top_k=20).hits
            assert got == oracle_grid_search(corpus.records, q, 20)

    def test_and_subset_of_or(self):
        rng = np.random.default_rng(56)
        corpus = make_corpus(rng, n=200)
        constraints = (("c3", "person"), ("d4", "car"))
        and_ids = {h[0] for h in corpus.grid_search(
            GridQuery(constraints=constraints), 1000).hits}
        or_ids = {h[0] for h in corpus.grid_search(
            GridQuery(constraints=constraints, operator=GridOperator.OR), 1000).hits}
        assert and_ids <= or_ids

    def test_and_anti_monotone(self):
        rng = np.random.default_rng(57)
        corpus = make_corpus(rng, n=200)
        base = (("c3", "person"),)
        more = base + (("d4", "car"),)
        small = {h[0] for h in corpus.grid_search(GridQuery(constraints=more), 1000).hits}
        large = {h[0] for h in corpus.grid_search(GridQuery(constraints=base), 1000).hits}
        assert small <= large


def oracle_text_search(records, field, query, top_k, fuzziness=0.25):
    q = query.lower().strip()
    q_tokens = q.split()
    scored = {}
    for rec in records:
        text = (rec.ocr_text if field == "ocr" else rec.tag_string).lower()
        if not text:
            continue
        if q in text:
            scored[rec.id] = 1.0
            continue
        total = 0.0
        for qt in q_tokens:
            best = max(fuzzy_score(qt, ft) for ft in text.split())
            if best >= 1 - fuzziness:
                total += best
        if total > 0:
            scored[rec.id] = total / len(q_tokens)
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0].sort_key))
    return ranked[:top_k]


class TestTextSearch:
    def test_exact_phrase_rank_one(self):
        records = [
            KeyframeRecord(id=kid(0), ocr_text="cu nang"),
            KeyframeRecord(id=kid(1), ocr_text="other words"),
        ]
        corpus = MetadataCorpus(records)
        ranked = corpus.text_search("ocr", "cu nang", top_k=10)
        assert ranked.hits[0] == (records[0].id, 1.0)

    def test_absent_token_excluded(self):
        records = [KeyframeRecord(id=kid(0), ocr_text="completely different")]
        corpus = MetadataCorpus(records)
        assert corpus.text_search("ocr", "zzzzqq", top_k=10).hits == []

    def test_tags_field(self):
        records = [
            KeyframeRecord(id=kid(0), tag_string="car1 person2"),
            KeyframeRecord(id=kid(1), tag_string="dog1"),
        ]
        corpus = MetadataCorpus(records)
        hits = corpus.text_search("tags", "person2", top_k=10).hits
        assert [h[0] for h in hits] == [records[0].id]

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(58)
        corpus = make_corpus(rng)
        for query in ("cu nang", "market", "kitchn", "sport news", "person"):
            got = corpus.text_search("ocr", query, top_k=25).hits
            assert got == oracle_text_search(corpus.records, "ocr", query, 25)


def test_color_terms_closed_palette():
    assert len(COLOR_TERMS) == 11
    assert set(COLOR_TERMS) == {
        "white", "black", "red", "green", "yellow", "blue",
        "brown", "purple", "pink", "orange", "gray",
    }
