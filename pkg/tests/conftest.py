import numpy as np
import pytest

from ctgs.catalog import EmbeddingTable, build_catalog
from ctgs.phonetics import parse_cmudict
from importlib import resources


@pytest.fixture(scope="session")
def lexicon():
    text = resources.files("ctgs.data").joinpath("lexicon_sample.dict").read_text("latin-1")
    return parse_cmudict(text.splitlines())


@pytest.fixture(scope="session")
def lipogram_text():
    return resources.files("ctgs.data").joinpath("lipogram_sample.txt").read_text("utf-8")


@pytest.fixture(scope="session")
def english_text():
    return resources.files("ctgs.data").joinpath("english_sample.txt").read_text("utf-8")


def make_embeddings(vectors: dict[str, list[float]]) -> EmbeddingTable:
    words = list(vectors)
    matrix = np.asarray([vectors[w] for w in words], dtype=np.float64)
    matrix = matrix / np.linalg.norm(matrix, axis=1, keepdims=True)
    return EmbeddingTable(words, matrix)


@pytest.fixture
def small_catalog(lexicon):
    return build_catalog(["the", "cat", "hat", "a"], lexicon=lexicon)


class FixedModel:
    """Test double: always returns the same distribution."""

    def __init__(self, catalog, probs):
        self.catalog = catalog
        self._probs = np.asarray(probs, dtype=np.float64)

    def next_distribution(self, context):
        from ctgs.models import Distribution

        return Distribution(self._probs.copy())

    def description(self):
        return "fixed"
