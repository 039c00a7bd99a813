"""Corpus loading, tokenization, length filtering and dataset sampling.

Corpora live on disk as JSONL: one object per line with keys ``id``,
``text`` and ``tags``. Tokenization is Unicode-aware and language-agnostic;
a bundled Finnish stopword list is the default filter for the experiments
this package was written for, but any newline-delimited word list works.
"""

from __future__ import annotations

import json
import random
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class Document:
    """A raw article plus its human-assigned keyword tags.

    ``tags`` may be empty; such documents can be ranked but are excluded
    from evaluation datasets, which need tags as relevance ground truth.
    """

    id: str
    text: str
    tags: tuple[str, ...]


@dataclass(frozen=True)
class TokenizedDocument:
    id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class DatasetSpec:
    """Length filter and sampling parameters for evaluation datasets."""

    min_words: int = 200
    max_words: int = 600
    dataset_size: int = 2000
    num_datasets: int = 10
    seed: int = 1

    def __post_init__(self) -> None:
        if self.min_words < 1 or self.max_words < self.min_words:
            raise ValueError(
                f"need 1 <= min_words <= max_words, got "
                f"({self.min_words}, {self.max_words})"
            )
        if self.dataset_size < 2:
            raise ValueError(f"dataset_size must be >= 2, got {self.dataset_size}")
        if self.num_datasets < 1:
            raise ValueError(f"num_datasets must be >= 1, got {self.num_datasets}")


def load_corpus(path: str | Path) -> list[Document]:
    """Read a JSONL corpus, validating ids and required keys.

    Raises ValueError naming the offending line for malformed JSON,
    missing or mistyped keys, and duplicate document ids.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise ValueError(f"{path}: line {lineno}: expected an object")
            for key in ("id", "text", "tags"):
                if key not in obj:
                    raise ValueError(f"{path}: line {lineno}: missing key {key!r}")
            doc_id, text, tags = obj["id"], obj["text"], obj["tags"]
            if not isinstance(doc_id, str) or not doc_id:
                raise ValueError(f"{path}: line {lineno}: id must be a non-empty string")
            if not isinstance(text, str):
                raise ValueError(f"{path}: line {lineno}: text must be a string")
            if not isinstance(tags, list) or any(not isinstance(t, str) for t in tags):
                raise ValueError(f"{path}: line {lineno}: tags must be a list of strings")
            if doc_id in seen:
                raise ValueError(f"{path}: line {lineno}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            docs.append(Document(id=doc_id, text=text, tags=tuple(tags)))
    return docs


def save_corpus(docs: list[Document], path: str | Path) -> None:
    """Write documents as JSONL, one object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(
                json.dumps(
                    {"id": doc.id, "text": doc.text, "tags": list(doc.tags)},
                    ensure_ascii=False,
                )
            )
            fh.write("\n")


class _PunctuationTable(dict):
    """str.translate table mapping any Unicode punctuation to a space.

    Filled lazily per code point so the full Unicode range is never scanned.
    """

    def __missing__(self, codepoint: int) -> int:
        if unicodedata.category(chr(codepoint)).startswith("P"):
            repl = 0x20
        else:
            repl = codepoint
        self[codepoint] = repl
        return repl


_PUNCT_TABLE = _PunctuationTable()


def tokenize(text: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Lowercase, replace punctuation with spaces, split, drop stopwords.

    Punctuation means any Unicode P* category character, so hyphenated
    compounds split into their parts. Stopwords are matched after
    lowercasing.
    """
    cleaned = text.lower().translate(_PUNCT_TABLE)
    return [tok for tok in cleaned.split() if tok not in stopwords]


def tokenize_documents(
    docs: list[Document], stopwords: frozenset[str] = frozenset()
) -> list[TokenizedDocument]:
    return [
        TokenizedDocument(id=doc.id, tokens=tuple(tokenize(doc.text, stopwords)))
        for doc in docs
    ]


def _parse_word_list(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line)
    return frozenset(words)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Load a stopword file: one word per line, # starts a comment line."""
    with open(path, encoding="utf-8") as fh:
        return _parse_word_list(fh.read())


def finnish_stopwords() -> frozenset[str]:
    """The bundled default Finnish stopword list."""
    text = resources.files("docsim").joinpath("data/stopwords_fi.txt").read_text("utf-8")
    return _parse_word_list(text)


def word_count(doc: Document) -> int:
    """Whitespace word count of the raw text, before any cleaning."""
    return len(doc.text.split())


def filter_by_length(docs: list[Document], spec: DatasetSpec) -> list[Document]:
    """Keep documents whose raw word count lies within the spec's range."""
    return [d for d in docs if spec.min_words <= word_count(d) <= spec.max_words]


def eligible_documents(docs: list[Document], spec: DatasetSpec) -> list[Document]:
    """Documents usable for evaluation: tagged and within the length range."""
    return filter_by_length([d for d in docs if d.tags], spec)


def sample_datasets(docs: list[Document], spec: DatasetSpec) -> list[list[Document]]:
    """Partition a random sample into disjoint fixed-size datasets.

    Shuffles with a seeded RNG, then slices ``num_datasets`` consecutive
    blocks of ``dataset_size``, so datasets share no documents and the
    split is reproducible for a given seed.
    """
    need = spec.dataset_size * spec.num_datasets
    if need > len(docs):
        raise ValueError(
            f"need {need} documents ({spec.num_datasets} datasets x "
            f"{spec.dataset_size}), only {len(docs)} available"
        )
    pool = list(docs)
    random.Random(spec.seed).shuffle(pool)
    return [
        pool[i * spec.dataset_size : (i + 1) * spec.dataset_size]
        for i in range(spec.num_datasets)
    ]
