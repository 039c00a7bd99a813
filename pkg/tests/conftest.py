"""Shared fixtures and the acceptance-criteria summary hook."""

import pytest
from hypothesis import HealthCheck, settings

from docsim import (
    SyntheticSpec,
    TrainConfig,
    build_ground_truth,
    build_vocabulary,
    generate_synthetic,
    tfidf_vectors,
    tokenize_documents,
    train_sgns,
)
from docsim.corpus import Document, TokenizedDocument

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def tiny_docs():
    """Three hand-checkable documents; token multisets [a b], [a c], [a b b]."""
    return [
        Document(id="d1", text="a b", tags=("x", "y")),
        Document(id="d2", text="a c", tags=("x", "z")),
        Document(id="d3", text="a b b", tags=("y",)),
    ]


@pytest.fixture
def tiny_tokens(tiny_docs):
    return [TokenizedDocument(id=d.id, tokens=tuple(d.text.split())) for d in tiny_docs]


@pytest.fixture(scope="session")
def small_docs():
    spec = SyntheticSpec(
        num_topics=5,
        docs=150,
        vocab_per_topic=100,
        shared_vocab=400,
        doc_length=(80, 160),
        tags_per_doc=(3, 5),
        seed=11,
    )
    return generate_synthetic(spec)


@pytest.fixture(scope="session")
def small_tokens(small_docs):
    return tokenize_documents(small_docs)


@pytest.fixture(scope="session")
def small_vocab(small_tokens):
    return build_vocabulary(small_tokens)


@pytest.fixture(scope="session")
def small_vectors(small_tokens, small_vocab):
    return tfidf_vectors(small_tokens, small_vocab)


@pytest.fixture(scope="session")
def small_emb(small_tokens):
    return train_sgns(small_tokens, TrainConfig(dim=32, epochs=4, seed=11), workers=1)


@pytest.fixture(scope="session")
def small_truth(small_docs):
    return build_ground_truth(small_docs)


_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_ACCEPTANCE):
        outcome = _ACCEPTANCE[nodeid]
        word = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{word}  {nodeid.split('::')[-1]}")
