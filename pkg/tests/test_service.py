"""HTTP service tests over the seeded demo corpus with mock providers."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from vidsearch.demo import (
    PLANT_OCR_KEYFRAME,
    PLANT_OCR_TEXT,
    PLANT_TEXT,
    PLANT_TEXT_KEYFRAME,
    PLANT_VIDEO,
)
from vidsearch.fusion import rrf_fuse
from vidsearch.grid_meta import GridOperator, GridQuery
from vidsearch.providers import ProviderConfig, HttpExpansionProvider
from vidsearch.search import parse_stage_query, ranked_payload, resolve_stage
from vidsearch.service import create_app


@pytest.fixture(scope="module")
def client(demo_corpus, mock_embedder, mock_expander):
    app = create_app(demo_corpus, mock_embedder, mock_expander)
    return TestClient(app)


class TestSearch:
    def test_metadata_grid_matches_library(self, client, demo_corpus):
        body = {
            "kind": "metadata",
            "grid": {"constraints": [{"cell": "c4", "class": "person"}], "operator": "AND"},
            "top_k": 100,
        }
        resp = client.post("/api/search", json=body)
        assert resp.status_code == 200
        expected = demo_corpus.metadata.grid_search(
            GridQuery(constraints=(("c4", "person"),), operator=GridOperator.AND), 100
        )
        got = resp.json()["hits"]
        assert [(h["video_id"], h["keyframe_index"]) for h in got] == [
            (kid.video_id, kid.keyframe_index) for kid, _ in expected.hits
        ]
        for h, (_, score) in zip(got, expected.hits):
            assert h["score"] == pytest.approx(score)

    def test_embedding_vector_passthrough(self, client, demo_corpus):
        rng = np.random.default_rng(1)
        vec = rng.standard_normal(demo_corpus.spaces["clip_demo"].dim)
        resp = client.post(
            "/api/search",
            json={"kind": "embedding", "space": "clip_demo", "vector": vec.tolist(), "top_k": 7},
        )
        assert resp.status_code == 200
        expected = demo_corpus.spaces["clip_demo"].search(vec, 7)
        got = resp.json()["hits"]
        assert [(h["video_id"], h["keyframe_index"]) for h in got] == [
            (kid.video_id, kid.keyframe_index) for kid, _ in expected.hits
        ]

    def test_planted_text_query_hits_target(self, client):
        resp = client.post(
            "/api/search",
            json={"kind": "embedding", "space": "clip_demo", "text": PLANT_TEXT, "top_k": 5},
        )
        top = resp.json()["hits"][0]
        assert (top["video_id"], top["keyframe_index"]) == (PLANT_VIDEO, PLANT_TEXT_KEYFRAME)
        assert top["score"] == pytest.approx(1.0, abs=1e-5)

    def test_multi_equals_rrf_of_parts(self, client, demo_corpus, mock_embedder, mock_expander):
        emb = {"kind": "embedding", "space": "clip_demo", "text": PLANT_TEXT, "top_k": 50}
        meta = {"kind": "metadata", "ocr": PLANT_OCR_TEXT, "top_k": 50}
        multi = client.post(
            "/api/search", json={"kind": "multi", "queries": [emb, meta], "top_k": 50}
        ).json()["hits"]
        parts = [
            resolve_stage(demo_corpus, parse_stage_query(q), mock_embedder, mock_expander)
            for q in (emb, meta)
        ]
        expected = ranked_payload(rrf_fuse(parts, top_k=50))["hits"]
        assert multi == expected

    def test_expansion_changes_nothing_fatal(self, client):
        resp = client.post(
            "/api/search",
            json={"kind": "embedding", "space": "clip_demo", "text": "a dog", "expand": True},
        )
        assert resp.status_code == 200
        assert resp.json()["total"] > 0

    def test_bad_query_400(self, client):
        resp = client.post("/api/search", json={"kind": "embedding", "space": "clip_demo"})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "bad_request"

    def test_unknown_space_400(self, client):
        resp = client.post(
            "/api/search", json={"kind": "embedding", "space": "nope", "text": "x"}
        )
        assert resp.status_code == 400

    def test_pagination(self, client):
        body = {"kind": "embedding", "space": "clip_demo", "text": "crowd", "top_k": 120}
        full = client.post("/api/search", json=body).json()
        total = full["total"]
        assert total == 120
        page1 = client.post("/api/search", json={**body, "page": 1, "page_size": 50}).json()
        page3 = client.post("/api/search", json={**body, "page": 3, "page_size": 50}).json()
        assert page1["page_size"] == 50 and len(page1["hits"]) == 50
        assert page1["total"] == total
        assert len(page3["hits"]) == max(0, min(total - 100, 50))
        assert page1["hits"] == full["hits"][:50]

    def test_bad_page_size_rejected(self, client):
        resp = client.post(
            "/api/search",
            json={"kind": "metadata", "tags": "person", "page_size": 17},
        )
        assert resp.status_code == 400

    def test_determinism(self, client):
        body = {"kind": "embedding", "space": "beit_demo", "text": "a car on a road", "top_k": 20}
        a = client.post("/api/search", json=body)
        b = client.post("/api/search", json=body)
        assert a.content == b.content


class TestTemporalSearch:
    def test_composition_with_library(
        self, client, demo_corpus, mock_embedder, mock_expander
    ):
        stages = [
            {"kind": "embedding", "space": "clip_demo", "text": PLANT_TEXT, "top_k": 50},
            {"kind": "metadata", "ocr": PLANT_OCR_TEXT, "top_k": 50},
        ]
        resp = client.post(
            "/api/temporal-search", json={"stages": stages, "window": 10, "top_k": 50}
        )
        assert resp.status_code == 200
        from vidsearch.search import run_temporal, temporal_payload

        expected = temporal_payload(
            run_temporal(
                demo_corpus,
                [parse_stage_query(s) for s in stages],
                window=10,
                top_k=50,
                embedder=mock_embedder,
                expander=mock_expander,
            )
        )
        assert resp.json() == expected

    def test_planted_temporal_scenario(self, client):
        stages = [
            {"kind": "embedding", "space": "clip_demo", "text": PLANT_TEXT, "top_k": 100},
            {"kind": "metadata", "ocr": PLANT_OCR_TEXT, "top_k": 100},
        ]
        hits = client.post(
            "/api/temporal-search", json={"stages": stages, "window": 10}
        ).json()["hits"]
        top = hits[0]
        assert (top["video_id"], top["keyframe_index"]) == (PLANT_VIDEO, PLANT_TEXT_KEYFRAME)
        assert top["chain"][0]["keyframe_index"] == PLANT_OCR_KEYFRAME

    def test_window_one_is_vacuous(self, client):
        stages = [
            {"kind": "embedding", "space": "clip_demo", "text": PLANT_TEXT, "top_k": 20},
            {"kind": "metadata", "ocr": PLANT_OCR_TEXT, "top_k": 20},
        ]
        hits = client.post(
            "/api/temporal-search", json={"stages": stages, "window": 1}
        ).json()["hits"]
        assert all(link is None for h in hits for link in h["chain"])
        # ranking reduces to stage-1 order
        single = client.post("/api/search", json=stages[0]).json()["hits"][:20]
        assert [(h["video_id"], h["keyframe_index"]) for h in hits] == [
            (h["video_id"], h["keyframe_index"]) for h in single
        ]

    def test_single_stage_rejected(self, client):
        resp = client.post(
            "/api/temporal-search",
            json={"stages": [{"kind": "metadata", "ocr": "x"}]},
        )
        assert resp.status_code == 400

    def test_five_stages_rejected(self, client):
        stage = {"kind": "metadata", "ocr": "x"}
        resp = client.post("/api/temporal-search", json={"stages": [stage] * 5})
        assert resp.status_code == 400


class TestNeighbors:
    def test_centered_window(self, client):
        resp = client.get(f"/api/keyframes/{PLANT_VIDEO}/15/neighbors?n=10")
        idxs = [n["keyframe_index"] for n in resp.json()["neighbors"]]
        assert idxs == [10, 11, 12, 13, 14, 16, 17, 18, 19, 20]

    def test_clipped_at_start(self, client):
        resp = client.get(f"/api/keyframes/{PLANT_VIDEO}/0/neighbors?n=10")
        idxs = [n["keyframe_index"] for n in resp.json()["neighbors"]]
        assert idxs == list(range(1, 11))

    def test_unknown_video_404(self, client):
        assert client.get("/api/keyframes/nope/0/neighbors").status_code == 404

    def test_media_urls_resolve(self, client):
        resp = client.get(f"/api/keyframes/{PLANT_VIDEO}/5/neighbors?n=4")
        for n in resp.json()["neighbors"]:
            media = client.get(n["media_url"])
            assert media.status_code == 200
            assert media.headers["content-type"] == "image/jpeg"


class TestMisc:
    def test_videos_listing(self, client, demo_corpus):
        data = client.get("/api/videos").json()
        assert len(data["videos"]) == len(demo_corpus.videos)

    def test_config(self, client):
        cfg = client.get("/api/config").json()
        assert cfg["grid_size"] == 7
        assert cfg["page_sizes"] == [10, 20, 50]
        assert len(cfg["color_terms"]) == 11
        assert {s["name"] for s in cfg["spaces"]} == {"clip_demo", "beit_demo"}

    def test_unknown_media_404(self, client):
        assert client.get("/media/nope/0.jpg").status_code == 404


class TestDegradation:
    def test_search_survives_expansion_timeout(self, demo_corpus, mock_embedder):
        class NeverUpClient:
            def post(self, url, json=None, headers=None):
                raise TimeoutError("down")

        expander = HttpExpansionProvider(
            ProviderConfig(endpoint_url="http://down.test", timeout_ms=100, retries=0),
            client=NeverUpClient(),
        )
        app = create_app(demo_corpus, mock_embedder, expander)
        with TestClient(app) as degraded:
            body = {
                "kind": "embedding", "space": "clip_demo",
                "text": PLANT_TEXT, "expand": True, "top_k": 5,
            }
            resp = degraded.post("/api/search", json=body)
            assert resp.status_code == 200
            unexpanded = degraded.post("/api/search", json={**body, "expand": False})
            assert resp.json() == unexpanded.json()

    def test_embedder_down_is_503(self, demo_corpus, mock_expander):
        class DownEmbedder:
            def embed(self, text, space):
                raise TimeoutError("down")

        app = create_app(demo_corpus, DownEmbedder(), mock_expander)
        with TestClient(app) as degraded:
            resp = degraded.post(
                "/api/search",
                json={"kind": "embedding", "space": "clip_demo", "text": "x"},
            )
            assert resp.status_code == 503
            assert resp.json()["error"]["code"] == "embedder_unavailable"
