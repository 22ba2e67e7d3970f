"""Pluggable query-expansion and text-embedding providers.

Each provider exists in two forms: a remote HTTP client (thin JSON shim over
any hosted model) and a deterministic local mock used for tests, demos, and
offline operation. Expansion failures degrade to the original query; the
embedder is mandatory and surfaces ProviderUnavailable.
"""

from __future__ import annotations

import hashlib
import logging
import random
import time
from dataclasses import dataclass

import httpx
import numpy as np

from .errors import DimensionMismatch, ProviderUnavailable

log = logging.getLogger(__name__)

MAX_VARIANTS = 16
BACKOFF_BASE_S = 0.2


@dataclass(frozen=True)
class ExpansionRequest:
    query_text: str
    n: int = 3
    language_hint: str | None = None

    def __post_init__(self):
        if not self.query_text:
            raise ValueError("query_text must be non-empty")
        if not (1 <= self.n <= MAX_VARIANTS):
            raise ValueError(f"n must be in [1, {MAX_VARIANTS}]")


@dataclass(frozen=True)
class ProviderConfig:
    endpoint_url: str
    auth_token: str = ""
    timeout_ms: int = 5000
    retries: int = 2

    def __post_init__(self):
        if self.timeout_ms < 100:
            raise ValueError("timeout_ms must be >= 100")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


class MockExpansionProvider:
    """Deterministic paraphrase templates; pure function of (query, n)."""

    TEMPLATES = (
        "{q}",
        "a photo of {q}",
        "a video frame showing {q}",
        "a scene of {q}",
        "an image depicting {q}",
        "footage of {q}",
        "{q} in a video",
        "{q}, wide shot",
        "{q}, close up",
        "a still frame of {q}",
        "a clip containing {q}",
        "{q} captured on camera",
        "{q} on screen",
        "a shot of {q}",
        "a keyframe with {q}",
        "{q} in the scene",
    )

    def expand(self, req: ExpansionRequest) -> list[str]:
        variants = []
        for tpl in self.TEMPLATES:
            v = tpl.format(q=req.query_text)
            if v not in variants:
                variants.append(v)
            if len(variants) == req.n:
                break
        return variants


class HttpExpansionProvider:
    """POST {"text", "n"} -> {"variants": [...]}; degrades on any failure."""

    def __init__(self, config: ProviderConfig, client: httpx.Client | None = None):
        self.config = config
        self._client = client or httpx.Client(
            timeout=config.timeout_ms / 1000.0
        )

    def expand(self, req: ExpansionRequest) -> list[str]:
        payload = {"text": req.query_text, "n": req.n}
        if req.language_hint:
            payload["language"] = req.language_hint
        try:
            data = _request_with_retries(
                self._client, self.config, payload
            )
            variants = [v for v in data.get("variants", []) if isinstance(v, str) and v]
        except ProviderUnavailable:
            log.warning("query expansion unavailable; continuing with original query")
            return [req.query_text]
        out = [req.query_text]
        for v in variants:
            if v not in out:
                out.append(v)
            if len(out) == req.n:
                break
        return out


def expand_query(req: ExpansionRequest, provider) -> list[str]:
    """Between 1 and n distinct variants; the original query is always first.

    Never raises into the search path: any provider failure degrades to the
    original query alone.
    """
    if req.n == 1:
        return [req.query_text]
    try:
        raw = provider.expand(req)
    except Exception:
        log.warning("query expansion failed; continuing with original query")
        return [req.query_text]
    out = [req.query_text]
    for v in raw:
        if isinstance(v, str) and v and v not in out:
            out.append(v)
        if len(out) == req.n:
            break
    return out


class MockEmbeddingProvider:
    """Seeded hash-to-unit-vector embedder; identical texts embed identically."""

    def __init__(self, dims: dict[str, int], seed: int = 0):
        self.dims = dict(dims)
        self.seed = seed

    def embed(self, text: str, space_name: str) -> np.ndarray:
        if space_name not in self.dims:
            raise DimensionMismatch(f"unknown space {space_name!r}")
        dim = self.dims[space_name]
        digest = hashlib.sha256(
            f"{self.seed}:{space_name}:{text}".encode("utf-8")
        ).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        v = rng.standard_normal(dim)
        return v / np.linalg.norm(v)


class HttpEmbeddingProvider:
    """POST {"text", "space"} -> {"vector": [...]}; failures surface."""

    def __init__(
        self,
        config: ProviderConfig,
        dims: dict[str, int],
        client: httpx.Client | None = None,
    ):
        self.config = config
        self.dims = dict(dims)
        self._client = client or httpx.Client(timeout=config.timeout_ms / 1000.0)

    def embed(self, text: str, space_name: str) -> np.ndarray:
        if space_name not in self.dims:
            raise DimensionMismatch(f"unknown space {space_name!r}")
        data = _request_with_retries(
            self._client, self.config, {"text": text, "space": space_name}
        )
        vec = np.asarray(data.get("vector", []), dtype=np.float64)
        if vec.shape != (self.dims[space_name],):
            raise DimensionMismatch(
                f"provider returned {vec.shape} for {self.dims[space_name]}-d "
                f"space {space_name}"
            )
        return vec


def embed_text(text: str, space_name: str, provider) -> np.ndarray:
    """Embed text into a registered space; mandatory, so failures propagate."""
    try:
        return provider.embed(text, space_name)
    except (ProviderUnavailable, DimensionMismatch):
        raise
    except Exception as exc:
        raise ProviderUnavailable(f"embedding provider failed: {type(exc).__name__}") from exc


def _request_with_retries(client: httpx.Client, config: ProviderConfig, payload: dict) -> dict:
    headers = {}
    if config.auth_token:
        headers["Authorization"] = f"Bearer {config.auth_token}"
    last_error = "unknown"
    for attempt in range(config.retries + 1):
        try:
            resp = client.post(config.endpoint_url, json=payload, headers=headers)
            resp.raise_for_status()
            return resp.json()
        except Exception as exc:
            # never echo headers/token into logs or errors
            last_error = type(exc).__name__
            if attempt < config.retries:
                delay = BACKOFF_BASE_S * (2**attempt)
                time.sleep(delay * (1.0 + random.random() * 0.1))
    raise ProviderUnavailable(
        f"provider at {config.endpoint_url} failed after "
        f"{config.retries + 1} attempts ({last_error})"
    )
