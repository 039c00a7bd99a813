"""TF-IDF document vectors and cosine-similarity rankings.

Term weight is relative frequency times log inverse document frequency:
``w = (count / doc_len) * ln(N / df)``. Vectors are L2-normalized by
default so weights stay in [0, 1] and cosine reduces to a dot product.

Rankings are stored column-major as index arrays into a sorted id list,
which keeps full 2000x2000 rankings cheap; per-query rows materialize as
``(neighbor_id, score)`` lists on access.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .corpus import TokenizedDocument


@dataclass
class Vocabulary:
    """Term ids and document frequencies for one corpus.

    Term ids follow first-appearance order over the tokenized corpus.
    """

    terms: list[str]
    term_to_id: dict[str, int]
    df: np.ndarray
    num_docs: int

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_id


def build_vocabulary(docs: list[TokenizedDocument]) -> Vocabulary:
    if not docs:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    term_to_id: dict[str, int] = {}
    df_counts: list[int] = []
    for doc in docs:
        seen: set[str] = set()
        for term in doc.tokens:
            if term in seen:
                continue
            seen.add(term)
            idx = term_to_id.get(term)
            if idx is None:
                term_to_id[term] = len(df_counts)
                df_counts.append(1)
            else:
                df_counts[idx] += 1
    return Vocabulary(
        terms=list(term_to_id),
        term_to_id=term_to_id,
        df=np.asarray(df_counts, dtype=np.int64),
        num_docs=len(docs),
    )


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """Write a vocabulary as TSV: a num_docs header, then term/id/df rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"num_docs\t{vocab.num_docs}\n")
        for i, term in enumerate(vocab.terms):
            fh.write(f"{term}\t{i}\t{int(vocab.df[i])}\n")


def load_vocabulary(path: str | Path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if len(header) != 2 or header[0] != "num_docs":
            raise ValueError(f"{path}: expected a num_docs header line")
        num_docs = int(header[1])
        terms: list[str] = []
        df_counts: list[int] = []
        for lineno, line in enumerate(fh, start=2):
            term, idx, df = line.rstrip("\n").split("\t")
            if int(idx) != len(terms):
                raise ValueError(f"{path}: line {lineno}: ids must be consecutive")
            terms.append(term)
            df_counts.append(int(df))
    return Vocabulary(
        terms=terms,
        term_to_id={t: i for i, t in enumerate(terms)},
        df=np.asarray(df_counts, dtype=np.int64),
        num_docs=num_docs,
    )


@dataclass(frozen=True)
class SparseVector:
    """Sparse non-negative feature vector with strictly increasing indices."""

    indices: np.ndarray
    values: np.ndarray

    @classmethod
    def empty(cls) -> "SparseVector":
        return cls(np.empty(0, dtype=np.int32), np.empty(0, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2)))


def tfidf_vector(
    doc: TokenizedDocument, vocab: Vocabulary, normalize: bool = True
) -> SparseVector:
    """TF-IDF vector of one document against a fixed vocabulary.

    TF is the in-document count over the document's total token count
    (out-of-vocabulary tokens still count toward the length). Terms whose
    weight is zero, e.g. df == N, are dropped, so a document of only
    ubiquitous terms yields an empty vector.
    """
    total = len(doc.tokens)
    if total == 0:
        return SparseVector.empty()
    counts = Counter(t for t in doc.tokens if t in vocab.term_to_id)
    ids: list[int] = []
    weights: list[float] = []
    for term, count in counts.items():
        i = vocab.term_to_id[term]
        w = (count / total) * math.log(vocab.num_docs / vocab.df[i])
        if w > 0.0:
            ids.append(i)
            weights.append(w)
    if not ids:
        return SparseVector.empty()
    order = np.argsort(ids)
    indices = np.asarray(ids, dtype=np.int32)[order]
    values = np.asarray(weights, dtype=np.float64)[order]
    if normalize:
        values = values / np.sqrt(np.sum(values**2))
    return SparseVector(indices=indices, values=values)


def tfidf_vectors(
    docs: list[TokenizedDocument], vocab: Vocabulary, normalize: bool = True
) -> dict[str, SparseVector]:
    return {doc.id: tfidf_vector(doc, vocab, normalize) for doc in docs}


def cosine(a, b) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm."""
    if isinstance(a, SparseVector):
        _, ia, ib = np.intersect1d(
            a.indices, b.indices, assume_unique=True, return_indices=True
        )
        dot = float(a.values[ia] @ b.values[ib])
        na, nb = a.norm(), b.norm()
    else:
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        dot = float(a @ b)
        na = float(np.sqrt(a @ a))
        nb = float(np.sqrt(b @ b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


@dataclass
class SimilarityRanking:
    """Per-query neighbor orderings over one document set.

    ``doc_ids`` is ascending and defines the index space: row q of
    ``neighbor_idx``/``scores`` lists the neighbors of ``doc_ids[q]`` by
    descending score, ties broken by ascending neighbor id. A document
    never appears among its own neighbors.
    """

    doc_ids: list[str]
    neighbor_idx: np.ndarray
    scores: np.ndarray
    _id_to_pos: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._id_to_pos = {d: i for i, d in enumerate(self.doc_ids)}

    @property
    def depth(self) -> int:
        """Number of neighbors kept per query."""
        return self.neighbor_idx.shape[1]

    def row(self, doc_id: str, n: int | None = None) -> list[tuple[str, float]]:
        q = self._id_to_pos[doc_id]
        idx = self.neighbor_idx[q] if n is None else self.neighbor_idx[q, :n]
        sc = self.scores[q] if n is None else self.scores[q, :n]
        return [(self.doc_ids[j], float(s)) for j, s in zip(idx, sc)]

    def neighbors(self, doc_id: str, n: int | None = None) -> list[str]:
        q = self._id_to_pos[doc_id]
        idx = self.neighbor_idx[q] if n is None else self.neighbor_idx[q, :n]
        return [self.doc_ids[j] for j in idx]

    def score(self, query_id: str, neighbor_id: str) -> float:
        q = self._id_to_pos[query_id]
        j = self._id_to_pos[neighbor_id]
        hits = np.nonzero(self.neighbor_idx[q] == j)[0]
        if len(hits) == 0:
            raise KeyError(f"{neighbor_id!r} not ranked for {query_id!r}")
        return float(self.scores[q, hits[0]])


def ranking_from_matrix(
    ids: list[str], score_matrix: np.ndarray, top_n: int | None = None
) -> SimilarityRanking:
    """Turn a square score matrix into a ranking, excluding self-pairs.

    ``ids`` must be ascending; row/column order must match it. Sorting is
    by descending score with ties broken by ascending id, via a stable
    sort over the already id-ordered columns.
    """
    n = len(ids)
    if n < 2:
        raise ValueError("ranking needs at least two documents")
    if score_matrix.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} score matrix, got {score_matrix.shape}")
    limit = n - 1 if top_n is None else min(top_n, n - 1)
    neighbor_idx = np.empty((n, limit), dtype=np.int32)
    scores = np.empty((n, limit), dtype=np.float64)
    work = score_matrix.astype(np.float64, copy=True)
    np.fill_diagonal(work, -np.inf)
    for q in range(n):
        order = np.argsort(-work[q], kind="stable")[:limit]
        neighbor_idx[q] = order
        scores[q] = work[q, order]
    return SimilarityRanking(doc_ids=list(ids), neighbor_idx=neighbor_idx, scores=scores)


def _csr_from_sparse_vectors(vecs: list[SparseVector]) -> sp.csr_matrix:
    dim = 0
    for v in vecs:
        if len(v):
            dim = max(dim, int(v.indices[-1]) + 1)
    indptr = np.zeros(len(vecs) + 1, dtype=np.int64)
    for i, v in enumerate(vecs):
        indptr[i + 1] = indptr[i] + len(v)
    data = np.concatenate([v.values for v in vecs]) if vecs else np.empty(0)
    indices = np.concatenate([v.indices for v in vecs]) if vecs else np.empty(0, np.int32)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vecs), max(dim, 1)))


def rank_all(
    vectors: dict[str, SparseVector], top_n: int | None = None
) -> SimilarityRanking:
    """Rank every document against every other by cosine of TF-IDF vectors."""
    ids = sorted(vectors)
    mat = _csr_from_sparse_vectors([vectors[i] for i in ids])
    norms = np.sqrt(np.asarray(mat.multiply(mat).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    unit = sp.diags(inv) @ mat
    sim = (unit @ unit.T).toarray()
    return ranking_from_matrix(ids, sim, top_n)


def save_ranking(ranking: SimilarityRanking, path: str | Path) -> None:
    """Write a ranking as TSV rows: query, rank, neighbor, score (6 dp).

    No header: the format is shared with cached ground truth and consumed
    by diff-based comparisons, so lines carry data only.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for q, doc_id in enumerate(ranking.doc_ids):
            for r in range(ranking.depth):
                j = ranking.neighbor_idx[q, r]
                fh.write(
                    f"{doc_id}\t{r + 1}\t{ranking.doc_ids[j]}\t"
                    f"{ranking.scores[q, r]:.6f}\n"
                )


def load_ranking(path: str | Path) -> SimilarityRanking:
    rows: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}: line {lineno}: expected 4 tab-separated fields")
            query, rank, neighbor, score = parts
            row = rows.setdefault(query, [])
            if int(rank) != len(row) + 1:
                raise ValueError(f"{path}: line {lineno}: ranks must count up from 1")
            row.append((neighbor, float(score)))
    if not rows:
        raise ValueError(f"{path}: no ranking rows")
    depths = {len(r) for r in rows.values()}
    if len(depths) != 1:
        raise ValueError(f"{path}: rows have differing depths {sorted(depths)}")
    depth = depths.pop()
    all_ids = sorted(set(rows) | {nb for row in rows.values() for nb, _ in row})
    id_to_pos = {d: i for i, d in enumerate(all_ids)}
    if set(rows) != set(all_ids):
        raise ValueError(f"{path}: every document must appear as a query")
    neighbor_idx = np.empty((len(all_ids), depth), dtype=np.int32)
    scores = np.empty((len(all_ids), depth), dtype=np.float64)
    for doc_id, row in rows.items():
        q = id_to_pos[doc_id]
        for r, (nb, sc) in enumerate(row):
            neighbor_idx[q, r] = id_to_pos[nb]
            scores[q, r] = sc
    return SimilarityRanking(doc_ids=all_ids, neighbor_idx=neighbor_idx, scores=scores)
