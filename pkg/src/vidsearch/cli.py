"""Operator command line: threshold runs, exemplar selection, corpus
generation, index validation, one-shot queries, and service launch."""

from __future__ import annotations

import json
import os
import sys

import click

from .demo import DEFAULT_MOCK_SEED, generate_demo_corpus
from .embed_index import save_space
from .errors import (
    DegenerateInput,
    ManifestError,
    ProviderUnavailable,
    QueryError,
    VidsearchError,
)
from .fusion import DEFAULT_TOP_K, DEFAULT_WINDOW
from .ingest import Corpus, load_corpus
from .keyframes import read_features, select_exemplars
from .providers import (
    HttpEmbeddingProvider,
    HttpExpansionProvider,
    MockEmbeddingProvider,
    MockExpansionProvider,
    ProviderConfig,
)
from .search import (
    dump_json,
    hit_payload,
    id_payload,
    parse_stage_query,
    resolve_stage,
    run_temporal,
)
from .threshold import AUTO, KdeConfig, read_score_file, solve_threshold

EXIT_MANIFEST = 1
EXIT_DEGENERATE = 2
EXIT_ERROR = 3


def _die(code: int, error_code: str, message: str):
    sys.stderr.write(dump_json({"error": {"code": error_code, "message": message}}) + "\n")
    sys.exit(code)


def _providers(corpus: Corpus, mock: bool, config_path: str | None):
    dims = {name: space.dim for name, space in corpus.spaces.items()}
    if mock:
        return MockEmbeddingProvider(dims, seed=DEFAULT_MOCK_SEED), MockExpansionProvider()
    cfg = {}
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    env = os.environ
    emb_url = cfg.get("embedder_url") or env.get("EMBEDDER_URL")
    exp_url = cfg.get("expansion_url") or env.get("EXPANSION_URL")
    if not emb_url:
        _die(EXIT_ERROR, "config", "EMBEDDER_URL not configured (or use --mock-providers)")
    embedder = HttpEmbeddingProvider(
        ProviderConfig(
            endpoint_url=emb_url,
            auth_token=cfg.get("embedder_token") or env.get("EMBEDDER_TOKEN", ""),
            timeout_ms=int(cfg.get("embedder_timeout_ms", 5000)),
        ),
        dims,
    )
    if exp_url:
        expander = HttpExpansionProvider(
            ProviderConfig(
                endpoint_url=exp_url,
                auth_token=cfg.get("expansion_token") or env.get("EXPANSION_TOKEN", ""),
                timeout_ms=int(cfg.get("expansion_timeout_ms", 8000)),
            )
        )
    else:
        expander = MockExpansionProvider()
    return embedder, expander


@click.group()
def main():
    """Multimodal video retrieval toolkit."""


@main.command()
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--bandwidth", type=float, default=None, help="KDE bandwidth (default: Silverman)")
@click.option("--json", "as_json", is_flag=True)
def threshold(scores_path, bandwidth, as_json):
    """Estimate the shot-boundary decision threshold from a score file."""
    try:
        series = read_score_file(scores_path)
        cfg = KdeConfig(bandwidth=bandwidth if bandwidth is not None else AUTO)
        result = solve_threshold(series, cfg)
    except DegenerateInput as exc:
        _die(EXIT_DEGENERATE, "degenerate_input", str(exc))
    payload = {
        "threshold": result.threshold,
        "mixture": [
            {"weight": c.weight, "mean": c.mean, "sigma": c.sigma}
            for c in result.mixture.components
        ],
        "log_likelihood": result.log_likelihood,
        "iterations": result.iterations,
        "fallback_used": result.fallback_used,
    }
    if as_json:
        click.echo(dump_json(payload))
    else:
        click.echo(f"threshold: {result.threshold:.6f}")
        for tag, c in zip(("low", "high"), result.mixture.components):
            click.echo(f"  {tag}: weight={c.weight:.4f} mean={c.mean:.4f} sigma={c.sigma:.4f}")
        click.echo(
            f"  iterations={result.iterations} fallback={result.fallback_used}"
        )


@main.command()
@click.option("--features", "features_path", required=True, type=click.Path(exists=True))
@click.option("--k", default=3, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def keyframes(features_path, k, seed, as_json):
    """Select centroid-nearest exemplar frames from a feature file."""
    try:
        feats = read_features(features_path)
        frames = select_exemplars(feats, k=k, seed=seed)
    except VidsearchError as exc:
        _die(EXIT_ERROR, type(exc).__name__, str(exc))
    if as_json:
        click.echo(dump_json({"exemplars": frames}))
    else:
        click.echo(" ".join(str(f) for f in frames))


@main.group()
def index():
    """Index maintenance commands."""


@index.command("build")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
def index_build(manifest_path):
    """Validate the corpus and rewrite space files in canonical form."""
    try:
        corpus = load_corpus(manifest_path)
        base = os.path.dirname(os.path.abspath(manifest_path))
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        for entry in manifest.get("spaces", []):
            path = entry["vector_file"]
            if not os.path.isabs(path):
                path = os.path.join(base, path)
            save_space(corpus.spaces[entry["name"]], path)
        click.echo(
            dump_json(
                {
                    "corpus_name": corpus.name,
                    "videos": len(corpus.videos),
                    "keyframes": len(corpus.keyframes),
                    "spaces": sorted(corpus.spaces),
                }
            )
        )
    except ManifestError as exc:
        _die(EXIT_MANIFEST, "manifest_error", str(exc))


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--stage", "stages", multiple=True, required=True, help="Stage query as JSON")
@click.option("--window", default=DEFAULT_WINDOW, show_default=True)
@click.option("--top-k", default=DEFAULT_TOP_K, show_default=True)
@click.option("--mock-providers", is_flag=True, default=True, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def query(manifest_path, stages, window, top_k, mock_providers, config_path):
    """Run one search (single stage) or temporal search (multiple stages).

    Results are printed as JSON lines, one hit per line, byte-identical to
    the service's per-hit serialization.
    """
    try:
        corpus = load_corpus(manifest_path)
    except ManifestError as exc:
        _die(EXIT_MANIFEST, "manifest_error", str(exc))
    embedder, expander = _providers(corpus, mock_providers, config_path)
    try:
        parsed = []
        for raw in stages:
            d = json.loads(raw)
            d.setdefault("top_k", top_k)
            parsed.append(parse_stage_query(d))
        if len(parsed) == 1:
            ranked = resolve_stage(corpus, parsed[0], embedder, expander)
            for kid, score in ranked.hits:
                click.echo(dump_json(hit_payload(kid, score)))
        else:
            result = run_temporal(
                corpus, parsed, window=window, top_k=top_k,
                embedder=embedder, expander=expander,
            )
            for h in result.hits:
                d = hit_payload(h.pivot, h.score)
                d["chain"] = [None if c is None else id_payload(c) for c in h.chain]
                click.echo(dump_json(d))
    except (QueryError, json.JSONDecodeError) as exc:
        _die(EXIT_ERROR, "bad_query", str(exc))
    except ProviderUnavailable as exc:
        _die(EXIT_ERROR, "provider_unavailable", str(exc))


@main.command("demo-corpus")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--videos", default=20, show_default=True)
@click.option("--keyframes", "keyframes_", default=30, show_default=True)
@click.option("--seed", default=0, show_default=True)
def demo_corpus(out_dir, videos, keyframes_, seed):
    """Generate the seeded synthetic demo corpus."""
    manifest_path = generate_demo_corpus(
        out_dir, videos=videos, keyframes=keyframes_, seed=seed
    )
    click.echo(dump_json({"manifest": manifest_path}))


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--mock-providers", is_flag=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(manifest_path, port, host, mock_providers, config_path):
    """Launch the HTTP service over a corpus."""
    import uvicorn

    from .service import create_app

    try:
        corpus = load_corpus(manifest_path)
    except ManifestError as exc:
        _die(EXIT_MANIFEST, "manifest_error", str(exc))
    embedder, expander = _providers(corpus, mock_providers, config_path)
    app = create_app(corpus, embedder, expander)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
