"""Weighted-average document vectors and dense all-pairs ranking."""

import numpy as np
import pytest

from docsim.baselines import avgwv_vector, avgwv_vectors, rank_dense
from docsim.corpus import TokenizedDocument
from docsim.embeddings import EmbeddingMatrix
from docsim.vectorize import (
    SparseVector,
    build_vocabulary,
    rank_all,
    tfidf_vectors,
)


def _emb(terms, rows):
    rows = np.asarray(rows, dtype=np.float32)
    return EmbeddingMatrix(
        vocab={t: i for i, t in enumerate(terms)},
        input_vectors=rows,
        output_vectors=np.zeros_like(rows),
        final_lr=0.0001,
    )


def _vocab(*term_docs):
    docs = [
        TokenizedDocument(id=f"d{i}", tokens=tuple(t)) for i, t in enumerate(term_docs)
    ]
    return build_vocabulary(docs)


class TestAvgwvVector:
    def test_single_feature_is_weight_times_vector(self):
        vocab = _vocab(["t1", "x"], ["x"])
        emb = _emb(["t1"], [[2.0, -4.0]])
        vec = SparseVector(
            indices=np.array([0], dtype=np.int32),
            values=np.array([0.7], dtype=np.float64),
        )
        got = avgwv_vector("q", vec, vocab, emb)
        assert got.doc_id == "q"
        np.testing.assert_allclose(got.values, [1.4, -2.8], rtol=0, atol=1e-12)

    def test_equal_weights_average_the_vectors(self):
        vocab = _vocab(["t1", "t2"], ["t1"], ["t2"])
        emb = _emb(["t1", "t2"], [[1.0, 0.0], [0.0, 1.0]])
        vec = SparseVector(
            indices=np.array([0, 1], dtype=np.int32),
            values=np.array([0.5, 0.5], dtype=np.float64),
        )
        got = avgwv_vector("q", vec, vocab, emb)
        np.testing.assert_allclose(got.values, [0.25, 0.25], rtol=0, atol=1e-12)

    def test_oov_features_excluded_from_denominator(self):
        # t2 has no embedding: result must equal the t1-only average
        vocab = _vocab(["t1", "t2"], ["t1"], ["t2"])
        emb = _emb(["t1"], [[3.0, 1.0]])
        both = SparseVector(
            indices=np.array([0, 1], dtype=np.int32),
            values=np.array([0.4, 0.9], dtype=np.float64),
        )
        only = SparseVector(
            indices=np.array([0], dtype=np.int32),
            values=np.array([0.4], dtype=np.float64),
        )
        a = avgwv_vector("q", both, vocab, emb)
        b = avgwv_vector("q", only, vocab, emb)
        np.testing.assert_allclose(a.values, b.values, rtol=0, atol=1e-15)

    def test_all_oov_gives_zero_vector(self):
        vocab = _vocab(["t1"], ["t1"])
        emb = _emb(["other"], [[1.0, 1.0]])
        vec = SparseVector(
            indices=np.array([0], dtype=np.int32),
            values=np.array([0.9], dtype=np.float64),
        )
        got = avgwv_vector("q", vec, vocab, emb)
        np.testing.assert_array_equal(got.values, [0.0, 0.0])

    def test_empty_tfidf_vector_gives_zero_vector(self):
        vocab = _vocab(["t1"], ["t1"])
        emb = _emb(["t1"], [[1.0, 1.0]])
        got = avgwv_vector("q", SparseVector.empty(), vocab, emb)
        np.testing.assert_array_equal(got.values, [0.0, 0.0])

    def test_linear_in_embedding_scale(self):
        vocab = _vocab(["t1", "t2"], ["t1"], ["t2"])
        base = np.array([[1.0, 2.0], [3.0, -1.0]])
        vec = SparseVector(
            indices=np.array([0, 1], dtype=np.int32),
            values=np.array([0.6, 0.2], dtype=np.float64),
        )
        small = avgwv_vector("q", vec, vocab, _emb(["t1", "t2"], base))
        big = avgwv_vector("q", vec, vocab, _emb(["t1", "t2"], 2.0 * base))
        np.testing.assert_allclose(big.values, 2.0 * small.values, rtol=0, atol=1e-12)


class TestRankDense:
    def test_agrees_with_sparse_ranking(self, small_tokens, small_vocab, small_vectors):
        # densified TF-IDF rows must reproduce the sparse cosine ranking
        dense = {
            doc_id: self._densify(vec, len(small_vocab))
            for doc_id, vec in small_vectors.items()
        }
        got = rank_dense(dense)
        want = rank_all(small_vectors)
        assert got.doc_ids == want.doc_ids
        assert np.array_equal(got.neighbor_idx, want.neighbor_idx)
        np.testing.assert_allclose(got.scores, want.scores, rtol=0, atol=1e-12)

    @staticmethod
    def _densify(vec, dim):
        out = np.zeros(dim)
        if len(vec):
            out[vec.indices] = vec.values
        return out

    def test_opposite_vectors_score_minus_one(self):
        v = np.array([1.0, 2.0, 3.0])
        ranking = rank_dense({"a": v, "b": -v})
        assert ranking.score("a", "b") == pytest.approx(-1.0, abs=1e-12)

    def test_zero_vector_scores_zero(self):
        ranking = rank_dense({"z": np.zeros(3), "a": np.ones(3), "b": np.ones(3)})
        assert ranking.score("a", "z") == 0.0
        assert ranking.score("z", "a") == 0.0

    def test_duplicate_ids_rejected(self):
        from docsim.baselines import DenseDocVector

        vecs = [
            DenseDocVector(doc_id="a", values=np.ones(2)),
            DenseDocVector(doc_id="a", values=np.zeros(2)),
        ]
        with pytest.raises(ValueError, match="duplicate"):
            rank_dense(vecs)

    def test_accepts_vector_list(self, small_vocab, small_vectors, small_emb):
        vecs = avgwv_vectors(small_vectors, small_vocab, small_emb)
        ranking = rank_dense(vecs, top_n=5)
        assert ranking.depth == 5
        assert len(ranking.doc_ids) == len(vecs)

    def test_avgwv_pipeline_scores_bounded(self, small_vocab, small_vectors, small_emb):
        ranking = rank_dense(avgwv_vectors(small_vectors, small_vocab, small_emb))
        assert np.all(ranking.scores <= 1.0 + 1e-9)
        assert np.all(ranking.scores >= -1.0 - 1e-9)
        assert np.all(np.isfinite(ranking.scores))
