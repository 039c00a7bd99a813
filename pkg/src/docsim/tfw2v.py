"""Embedding-enriched re-ranking of TF-IDF similarity lists.

The base ranking comes from TF-IDF cosine. For each query-neighbor pair,
the cosine of the mean embeddings of the two documents' highest-weight
terms is blended into the base score:

    new = (wv * alpha + sim) / (1 + alpha)

which stays in [0, 1] for inputs in [0, 1] and equals the arithmetic mean
at alpha = 1. With alpha = 0 the blend reduces to the base score exactly,
so the re-ranked list is identical to plain TF-IDF. When either document
has no usable feature terms the embedding score is undefined and the pair
keeps its base score.

``enrich_row`` is the per-pair reference implementation; ``tfw2v_rank``
computes the same scores for a whole corpus via precomputed mean-vector
rows and one matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingMatrix, mean_vector, set_similarity
from .vectorize import SimilarityRanking, SparseVector, Vocabulary, rank_all

FeatureSet = list[tuple[int, float]]


@dataclass(frozen=True)
class TfwParams:
    """Feature selection and blending knobs.

    min_weight cuts terms below an absolute TF-IDF weight; max_term caps
    how many surviving terms represent a document; alpha is the weight of
    the embedding score relative to the base score.
    """

    min_weight: float = 0.08
    max_term: int = 20
    alpha: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 <= self.min_weight <= 1.0:
            raise ValueError(f"min_weight must be in [0, 1], got {self.min_weight}")
        if self.max_term < 1:
            raise ValueError(f"max_term must be >= 1, got {self.max_term}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")


def select_features(vec: SparseVector, params: TfwParams) -> FeatureSet:
    """A document's highest-weight terms: weight >= min_weight, ordered by
    descending weight with ties broken by ascending term id, at most
    max_term entries. May be empty."""
    pairs = [
        (int(i), float(w))
        for i, w in zip(vec.indices, vec.values)
        if w >= params.min_weight
    ]
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return pairs[: params.max_term]


def new_score(wv_score: float, sim_score: float, alpha: float) -> float:
    """Blend the embedding score into the base score."""
    return (wv_score * alpha + sim_score) / (1.0 + alpha)


def enrich_ranking(
    query_features: FeatureSet,
    base_row: list[tuple[str, float]],
    all_features: dict[str, FeatureSet],
    vocab: Vocabulary,
    emb: EmbeddingMatrix,
    params: TfwParams,
) -> list[tuple[str, float]]:
    """Re-score one ranking row pair by pair (reference implementation).

    Returns (neighbor_id, new_score) sorted by descending score, ties by
    ascending id. A row whose query has an empty feature set comes back
    unchanged, since every pair is then undefined.
    """
    q_terms = [vocab.terms[i] for i, _ in query_features]
    rescored = []
    for nb, sim in base_row:
        nb_terms = [vocab.terms[i] for i, _ in all_features[nb]]
        wv = set_similarity(q_terms, nb_terms, emb)
        score = sim if wv is None else new_score(wv, sim, params.alpha)
        rescored.append((nb, score))
    rescored.sort(key=lambda p: (-p[1], p[0]))
    return rescored


def tfw2v_rank_all(
    vectors: dict[str, SparseVector],
    vocab: Vocabulary,
    emb: EmbeddingMatrix,
    params: TfwParams = TfwParams(),
    base: SimilarityRanking | None = None,
    candidate_cutoff: int | None = None,
    top_n: int | None = None,
) -> SimilarityRanking:
    """Re-rank a whole corpus.

    By default the full base ranking is computed from ``vectors`` and every
    row is re-scored end to end. ``candidate_cutoff`` restricts enrichment
    to the head of each row: the first K entries are re-scored and
    re-sorted among themselves, the tail keeps its base order. ``top_n``
    truncates rows after re-ranking.
    """
    if base is None:
        base = rank_all(vectors)
    ids = base.doc_ids
    n = len(ids)
    # mean embedding per feature set, shared with the per-pair path
    means = np.zeros((n, emb.dim), dtype=np.float64)
    defined = np.zeros(n, dtype=bool)
    for q, doc_id in enumerate(ids):
        feats = select_features(vectors[doc_id], params)
        m = mean_vector(emb, [vocab.terms[i] for i, _ in feats])
        if m is not None:
            means[q] = m
            defined[q] = True
    norms = np.sqrt(np.sum(means**2, axis=1))
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    unit = means * inv[:, None]
    wv_all = unit @ unit.T

    depth = base.depth
    cut = depth if candidate_cutoff is None else max(1, min(candidate_cutoff, depth))
    neighbor_idx = base.neighbor_idx.copy()
    scores = base.scores.copy()
    alpha = params.alpha
    for q in range(n):
        nb = base.neighbor_idx[q, :cut]
        sims = base.scores[q, :cut]
        pair_defined = defined[q] & defined[nb]
        blended = np.where(
            pair_defined, (wv_all[q, nb] * alpha + sims) / (1.0 + alpha), sims
        )
        order = np.lexsort((nb, -blended))
        neighbor_idx[q, :cut] = nb[order]
        scores[q, :cut] = blended[order]
    if top_n is not None and top_n < depth:
        neighbor_idx = neighbor_idx[:, :top_n].copy()
        scores = scores[:, :top_n].copy()
    return SimilarityRanking(doc_ids=list(ids), neighbor_idx=neighbor_idx, scores=scores)
