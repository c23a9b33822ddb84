import pytest

from foamagent.evaluation.benchmark import load_bundle, packaged_fixtures_dir
from foamagent.rag.embedding import HashedTokenEmbedder
from foamagent.rag.index import build_index


@pytest.fixture(scope="session")
def fixtures_dir():
    return packaged_fixtures_dir()


@pytest.fixture(scope="session")
def corpus_dir(fixtures_dir):
    return fixtures_dir / "corpus"


@pytest.fixture(scope="session")
def embedder():
    return HashedTokenEmbedder()


@pytest.fixture(scope="session")
def indices(corpus_dir, embedder):
    return build_index(corpus_dir, embedder)


@pytest.fixture(scope="session")
def bundle_loader(fixtures_dir):
    def load(name):
        return load_bundle(fixtures_dir / "cases" / name)

    return load
