"""Provider tests: mock determinism, degradation contracts, HTTP shims."""

import logging

import numpy as np
import pytest

from vidsearch.errors import DimensionMismatch, ProviderUnavailable
from vidsearch.providers import (
    ExpansionRequest,
    HttpEmbeddingProvider,
    HttpExpansionProvider,
    MockEmbeddingProvider,
    MockExpansionProvider,
    ProviderConfig,
    embed_text,
    expand_query,
)


class FailingProvider:
    def expand(self, req):
        raise TimeoutError("simulated timeout")

    def embed(self, text, space):
        raise TimeoutError("simulated timeout")


class TestExpandQuery:
    def test_mock_deterministic(self):
        req = ExpansionRequest(query_text="a man riding a bicycle", n=3)
        provider = MockExpansionProvider()
        a = expand_query(req, provider)
        b = expand_query(req, provider)
        assert a == b
        assert len(a) == 3
        assert a[0] == "a man riding a bicycle"
        assert len(set(a)) == 3

    def test_timeout_degrades_to_original(self):
        req = ExpansionRequest(query_text="query", n=3)
        assert expand_query(req, FailingProvider()) == ["query"]

    def test_n_one_skips_provider(self):
        req = ExpansionRequest(query_text="query", n=1)
        assert expand_query(req, FailingProvider()) == ["query"]

    def test_request_validation(self):
        with pytest.raises(ValueError):
            ExpansionRequest(query_text="", n=3)
        with pytest.raises(ValueError):
            ExpansionRequest(query_text="q", n=17)


class TestMockEmbedding:
    def test_identical_texts_collide(self):
        p = MockEmbeddingProvider({"clip": 64}, seed=3)
        a = p.embed("hello world", "clip")
        b = p.embed("hello world", "clip")
        assert np.array_equal(a, b)

    def test_unit_vector_of_right_dim(self):
        p = MockEmbeddingProvider({"clip": 64}, seed=3)
        v = p.embed("anything", "clip")
        assert v.shape == (64,)
        assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_different_texts_differ(self):
        p = MockEmbeddingProvider({"clip": 64}, seed=3)
        assert not np.array_equal(p.embed("a", "clip"), p.embed("b", "clip"))

    def test_unknown_space(self):
        p = MockEmbeddingProvider({"clip": 64}, seed=3)
        with pytest.raises(DimensionMismatch):
            p.embed("x", "nope")

    def test_embed_text_surfaces_failure(self):
        with pytest.raises(ProviderUnavailable):
            embed_text("x", "clip", FailingProvider())


class FakeResponse:
    def __init__(self, payload, status=200):
        self._payload = payload
        self.status_code = status

    def raise_for_status(self):
        if self.status_code >= 400:
            raise RuntimeError(f"http {self.status_code}")

    def json(self):
        return self._payload


class FakeClient:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def post(self, url, json=None, headers=None):
        self.calls.append((url, json, headers))
        result = self.responses.pop(0)
        if isinstance(result, Exception):
            raise result
        return result


class TestHttpProviders:
    CFG = ProviderConfig(endpoint_url="http://provider.test/api", auth_token="s3cret",
                         timeout_ms=500, retries=1)

    def test_expansion_success(self):
        client = FakeClient([FakeResponse({"variants": ["v1", "v2", "v3"]})])
        p = HttpExpansionProvider(self.CFG, client=client)
        out = p.expand(ExpansionRequest(query_text="orig", n=3))
        assert out == ["orig", "v1", "v2"]

    def test_expansion_degrades_after_retries(self):
        client = FakeClient([TimeoutError(), TimeoutError()])
        p = HttpExpansionProvider(self.CFG, client=client)
        out = p.expand(ExpansionRequest(query_text="orig", n=3))
        assert out == ["orig"]
        assert len(client.calls) == 2

    def test_embedding_success(self):
        client = FakeClient([FakeResponse({"vector": [1.0, 0.0, 0.0]})])
        p = HttpEmbeddingProvider(self.CFG, {"clip": 3}, client=client)
        assert p.embed("x", "clip").tolist() == [1.0, 0.0, 0.0]

    def test_embedding_wrong_dimension(self):
        client = FakeClient([FakeResponse({"vector": [1.0, 0.0]})])
        p = HttpEmbeddingProvider(self.CFG, {"clip": 3}, client=client)
        with pytest.raises(DimensionMismatch):
            p.embed("x", "clip")

    def test_embedding_unavailable_after_retries(self, monkeypatch):
        monkeypatch.setattr("vidsearch.providers.time.sleep", lambda s: None)
        client = FakeClient([TimeoutError(), TimeoutError()])
        p = HttpEmbeddingProvider(self.CFG, {"clip": 3}, client=client)
        with pytest.raises(ProviderUnavailable):
            p.embed("x", "clip")

    def test_auth_header_sent_but_never_logged(self, caplog, monkeypatch):
        monkeypatch.setattr("vidsearch.providers.time.sleep", lambda s: None)
        client = FakeClient([TimeoutError(), TimeoutError()])
        p = HttpExpansionProvider(self.CFG, client=client)
        with caplog.at_level(logging.DEBUG):
            p.expand(ExpansionRequest(query_text="orig", n=2))
        assert client.calls[0][2]["Authorization"] == "Bearer s3cret"
        assert "s3cret" not in caplog.text
