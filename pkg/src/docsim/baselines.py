"""Dense-vector ranking baselines: weighted word-vector averages and
document vectors.

A document's AvgWV representation is the mean of its distinct feature
terms' embeddings, each scaled by the term's normalized TF-IDF weight:

    D = (1/N) sum_i  w_i * WV_i

where N counts the document's features that are in the embedding
vocabulary. Doc-vector models already produce one dense vector per
document; both paths share ``rank_dense`` so all dense methods rank
through identical code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingMatrix
from .vectorize import SimilarityRanking, SparseVector, Vocabulary, ranking_from_matrix


@dataclass(frozen=True)
class DenseDocVector:
    doc_id: str
    values: np.ndarray


def avgwv_vector(
    doc_id: str, doc_tfidf: SparseVector, vocab: Vocabulary, emb: EmbeddingMatrix
) -> DenseDocVector:
    """Weighted average of a document's feature embeddings.

    Features missing from the embedding vocabulary are skipped and do not
    count toward the average's denominator. A document with no usable
    features maps to the zero vector, which ranks at similarity 0.
    """
    rows: list[int] = []
    weights: list[float] = []
    for i, w in zip(doc_tfidf.indices, doc_tfidf.values):
        row = emb.vocab.get(vocab.terms[i])
        if row is not None:
            rows.append(row)
            weights.append(float(w))
    if not rows:
        return DenseDocVector(doc_id, np.zeros(emb.dim, dtype=np.float64))
    vectors = emb.input_vectors[rows].astype(np.float64)
    weighted = vectors * np.asarray(weights, dtype=np.float64)[:, None]
    return DenseDocVector(doc_id, np.mean(weighted, axis=0))


def avgwv_vectors(
    vectors: dict[str, SparseVector], vocab: Vocabulary, emb: EmbeddingMatrix
) -> list[DenseDocVector]:
    return [avgwv_vector(doc_id, vec, vocab, emb) for doc_id, vec in vectors.items()]


def rank_dense(
    vectors: list[DenseDocVector] | dict[str, np.ndarray],
    top_n: int | None = None,
) -> SimilarityRanking:
    """Rank documents by pairwise cosine of dense vectors.

    Same contract as the sparse ranking: descending score, ascending-id
    tie-break, self excluded. Scores may be negative for embedding-space
    vectors.
    """
    if isinstance(vectors, dict):
        by_id = {d: np.asarray(v, dtype=np.float64) for d, v in vectors.items()}
    else:
        by_id = {v.doc_id: np.asarray(v.values, dtype=np.float64) for v in vectors}
        if len(by_id) != len(vectors):
            raise ValueError("duplicate document ids")
    ids = sorted(by_id)
    mat = np.stack([by_id[d] for d in ids])
    norms = np.sqrt(np.sum(mat**2, axis=1))
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    unit = mat * inv[:, None]
    return ranking_from_matrix(ids, unit @ unit.T, top_n)
