import pytest

from vidsearch.demo import DEFAULT_MOCK_SEED, generate_demo_corpus
from vidsearch.ingest import load_corpus
from vidsearch.providers import MockEmbeddingProvider, MockExpansionProvider


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo_corpus")
    generate_demo_corpus(str(out), videos=8, keyframes=30, seed=0)
    return out


@pytest.fixture(scope="session")
def demo_corpus(demo_dir):
    return load_corpus(demo_dir / "manifest.json")


@pytest.fixture(scope="session")
def mock_embedder(demo_corpus):
    dims = {name: space.dim for name, space in demo_corpus.spaces.items()}
    return MockEmbeddingProvider(dims, seed=DEFAULT_MOCK_SEED)


@pytest.fixture(scope="session")
def mock_expander():
    return MockExpansionProvider()
