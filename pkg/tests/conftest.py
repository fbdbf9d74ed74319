import pytest

from entlink import fixtures, nn
from entlink.vectors import WordVectors


@pytest.fixture
def rng():
    return nn.make_rng(1234)


@pytest.fixture(scope="session")
def topic_vectors():
    return fixtures.synthetic_word_vectors(seed=42)


@pytest.fixture
def tiny_vectors():
    return WordVectors(["finance", "military", "bank"], [[1.0, 0.0], [0.0, 1.0], [0.8, 0.2]])
