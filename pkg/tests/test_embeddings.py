"""Embedding training: RNG, alias sampling, SGNS, and doc vectors."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from docsim.corpus import TokenizedDocument
from docsim.embeddings import (
    DocEmbeddings,
    EmbeddingMatrix,
    TrainConfig,
    _rng_outputs,
    _training_vocab,
    build_alias,
    doc_train_config,
    load_doc_embeddings,
    load_word_embeddings,
    mean_vector,
    save_doc_embeddings,
    save_word_embeddings,
    set_similarity,
    train_pvdbow,
    train_sgns,
)


def _reference_splitmix64(seed: int, count: int) -> list[int]:
    """Straight transcription of the published splitmix64 recipe."""
    mask = (1 << 64) - 1
    state = seed & mask
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


def _uniforms(seed: int, count: int) -> np.ndarray:
    # same word-to-float mapping the training kernels use
    raw = _rng_outputs(seed, count)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


class TestRng:
    @pytest.mark.parametrize("seed", [0, 1, 42, 12345, 2**62])
    def test_matches_reference_implementation(self, seed):
        got = _rng_outputs(seed, 64)
        want = _reference_splitmix64(seed, 64)
        assert got.tolist() == want

    def test_uniforms_in_unit_interval(self):
        u = _uniforms(7, 10_000)
        assert float(u.min()) >= 0.0 and float(u.max()) < 1.0
        # crude uniformity: mean ~0.5 within 5 sigma
        assert abs(float(u.mean()) - 0.5) < 5 * (1 / math.sqrt(12 * 10_000))


class TestAliasTable:
    @given(
        st.lists(
            st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
            min_size=1,
            max_size=40,
        ).filter(lambda w: sum(w) > 0)
    )
    def test_implied_distribution_is_exact(self, weights):
        prob, alias = build_alias(np.asarray(weights))
        n = len(weights)
        implied = np.zeros(n)
        for k in range(n):
            implied[k] += prob[k] / n
            implied[alias[k]] += (1.0 - prob[k]) / n
        np.testing.assert_allclose(implied, np.asarray(weights) / sum(weights),
                                   rtol=0, atol=1e-12)

    def test_probabilities_in_unit_interval(self):
        prob, alias = build_alias(np.array([5.0, 1.0, 0.25, 3.75]))
        assert np.all((prob >= 0.0) & (prob <= 1.0))
        assert np.all((alias >= 0) & (alias < 4))

    @pytest.mark.parametrize(
        "weights", [[], [-1.0, 2.0], [0.0, 0.0], [np.nan, 1.0], [np.inf]]
    )
    def test_rejects_bad_weights(self, weights):
        with pytest.raises(ValueError):
            build_alias(np.asarray(weights, dtype=np.float64))

    def test_sampled_frequencies_close_to_target(self):
        # unigram^0.75 over a Zipf-ish vocabulary, fixed seed: deterministic
        counts = (1.0 / np.arange(1, 51)) ** 0.75
        prob, alias = build_alias(counts)
        n = len(counts)
        u = _uniforms(123, 2_000_000)
        slots = np.minimum((u[0::2] * n).astype(np.int64), n - 1)
        accept = u[1::2] < prob[slots]
        draws = np.where(accept, slots, alias[slots])
        freq = np.bincount(draws, minlength=n) / draws.size
        target = counts / counts.sum()
        tv = 0.5 * np.abs(freq - target).sum()
        assert tv < 0.01


class TestTrainConfig:
    def test_defaults(self):
        cfg = TrainConfig()
        assert (cfg.dim, cfg.window, cfg.negatives, cfg.epochs) == (128, 5, 5, 20)
        assert (cfg.min_count, cfg.initial_lr, cfg.final_lr) == (2, 0.025, 0.0001)

    def test_doc_variant_defaults(self):
        cfg = doc_train_config()
        assert (cfg.dim, cfg.epochs, cfg.negatives) == (100, 30, 5)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dim": 0},
            {"window": 0},
            {"negatives": 0},
            {"epochs": 0},
            {"min_count": 0},
            {"initial_lr": 0.0001, "final_lr": 0.0001},
            {"final_lr": 0.0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)


def _toy_corpus(n_docs=60, seed=0):
    """cat/dog share contexts; car lives in a different neighborhood."""
    rng = np.random.default_rng(seed)
    pets = ["fur", "purr", "tail", "vet", "bowl", "sleep"]
    autos = ["road", "fuel", "wheel", "brake", "garage", "drive"]
    docs = []
    for i in range(n_docs):
        if i % 3 == 0:
            words = ["cat"] + list(rng.choice(pets, 6))
        elif i % 3 == 1:
            words = ["dog"] + list(rng.choice(pets, 6))
        else:
            words = ["car"] + list(rng.choice(autos, 6))
        rng.shuffle(words)
        docs.append(TokenizedDocument(id=f"t{i}", tokens=tuple(words)))
    return docs


class TestTrainSgns:
    def test_min_count_prunes_vocabulary(self):
        docs = [
            TokenizedDocument(id="a", tokens=("x", "y", "x", "z")),
            TokenizedDocument(id="b", tokens=("x", "y", "rare")),
        ]
        emb = train_sgns(docs, TrainConfig(dim=8, epochs=1, min_count=2))
        assert "x" in emb and "y" in emb
        assert "z" not in emb and "rare" not in emb

    def test_no_trainable_terms_raises(self):
        docs = [TokenizedDocument(id="a", tokens=("one", "two"))]
        with pytest.raises(ValueError, match="min_count"):
            train_sgns(docs, TrainConfig(dim=8, epochs=1, min_count=5))

    def test_finite_and_schedule_floor(self, small_emb):
        assert np.all(np.isfinite(small_emb.input_vectors))
        assert np.all(np.isfinite(small_emb.output_vectors))
        assert small_emb.final_lr == pytest.approx(0.0001, abs=1e-12)

    def test_deterministic_per_seed(self, small_tokens):
        cfg = TrainConfig(dim=16, epochs=2, seed=5)
        a = train_sgns(small_tokens, cfg, workers=1)
        b = train_sgns(small_tokens, cfg, workers=1)
        assert np.array_equal(a.input_vectors, b.input_vectors)
        assert np.array_equal(a.output_vectors, b.output_vectors)
        c = train_sgns(small_tokens, TrainConfig(dim=16, epochs=2, seed=6), workers=1)
        assert not np.array_equal(a.input_vectors, c.input_vectors)

    def test_learns_toy_semantics(self):
        hits = 0
        for seed in range(10):
            emb = train_sgns(
                _toy_corpus(seed=0),
                TrainConfig(dim=16, epochs=12, min_count=2, seed=seed),
            )
            cat, dog, car = (emb.vector(w) for w in ("cat", "dog", "car"))

            def cos(u, v):
                return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))

            if cos(cat, dog) > cos(cat, car):
                hits += 1
        assert hits >= 9

    def test_vector_lookup_errors(self, small_emb):
        with pytest.raises(KeyError):
            small_emb.vector("definitely-not-a-term")


class TestTrainPvdbow:
    def test_covers_every_document(self, small_tokens):
        demb = train_pvdbow(small_tokens, doc_train_config(dim=16, epochs=2))
        assert len(demb) == len(small_tokens)
        assert set(demb.doc_ids) == {d.id for d in small_tokens}
        assert np.all(np.isfinite(demb.vectors))

    def test_single_document_corpus(self):
        docs = [TokenizedDocument(id="only", tokens=("a", "b", "a", "b", "a"))]
        demb = train_pvdbow(docs, doc_train_config(dim=8, epochs=2))
        vec = demb.vector("only")
        assert vec.shape == (8,) and np.all(np.isfinite(vec))

    def test_duplicate_documents_end_up_close(self):
        rng = np.random.default_rng(4)
        shared = tuple(rng.choice([f"w{i}" for i in range(30)], 40).tolist())
        docs = [TokenizedDocument(id="dup1", tokens=shared),
                TokenizedDocument(id="dup2", tokens=shared)]
        for i in range(20):
            toks = tuple(rng.choice([f"w{i}" for i in range(30)], 40).tolist())
            docs.append(TokenizedDocument(id=f"r{i}", tokens=toks))
        hits = 0
        for seed in range(10):
            demb = train_pvdbow(docs, doc_train_config(dim=16, epochs=20, seed=seed))
            a, b = demb.vector("dup1"), demb.vector("dup2")
            others = [demb.vector(f"r{i}") for i in range(20)]

            def cos(u, v):
                return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))

            dup_sim = cos(a, b)
            rand_sim = np.mean([cos(a, o) for o in others])
            if dup_sim > rand_sim:
                hits += 1
        assert hits >= 9

    def test_deterministic_per_seed(self, small_tokens):
        cfg = doc_train_config(dim=16, epochs=2, seed=5)
        a = train_pvdbow(small_tokens, cfg, workers=1)
        b = train_pvdbow(small_tokens, cfg, workers=1)
        assert np.array_equal(a.vectors, b.vectors)


class TestTrainingVocab:
    def test_sorted_by_count_then_term(self):
        docs = [
            TokenizedDocument(id="a", tokens=("b", "b", "c", "c", "a", "a", "a", "z")),
        ]
        terms, counts = _training_vocab(docs, min_count=2)
        assert terms == ["a", "b", "c"]
        assert counts.tolist() == [3, 2, 2]


class TestPersistence:
    def test_word_round_trip_is_exact(self, small_emb, tmp_path):
        path = tmp_path / "wv.txt"
        save_word_embeddings(small_emb, path)
        loaded = load_word_embeddings(path)
        assert set(loaded.vocab) == set(small_emb.vocab)
        for term in list(small_emb.vocab)[:50]:
            np.testing.assert_array_equal(loaded.vector(term), small_emb.vector(term))

    def test_doc_round_trip_allows_spaces_in_ids(self, tmp_path):
        vectors = np.array([[0.125, -3.5], [1e-8, 2.25]], dtype=np.float32)
        demb = DocEmbeddings(doc_ids=["plain", "with space"], vectors=vectors,
                             final_lr=0.0001)
        path = tmp_path / "dv.txt"
        save_doc_embeddings(demb, path)
        loaded = load_doc_embeddings(path)
        assert loaded.doc_ids == demb.doc_ids
        np.testing.assert_array_equal(loaded.vectors, demb.vectors)

    def test_header_counts_rows(self, small_emb, tmp_path):
        path = tmp_path / "wv.txt"
        save_word_embeddings(small_emb, path)
        first = path.read_text(encoding="utf-8").splitlines()[0].split()
        assert int(first[0]) == len(small_emb)
        assert int(first[1]) == small_emb.dim

    def test_duplicate_names_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\nsame 1.0 2.0\nsame 3.0 4.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match="duplicate"):
            load_word_embeddings(path)


def _tiny_embedding():
    terms = ["a", "b", "c"]
    vecs = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], dtype=np.float32)
    return EmbeddingMatrix(
        vocab={t: i for i, t in enumerate(terms)},
        input_vectors=vecs,
        output_vectors=np.zeros_like(vecs),
        final_lr=0.0001,
    )


class TestSetSimilarity:
    def test_mean_vector_exact(self):
        emb = _tiny_embedding()
        np.testing.assert_allclose(mean_vector(emb, ["a", "b"]), [0.5, 0.5])
        assert mean_vector(emb, ["nope", "nah"]) is None
        assert mean_vector(emb, []) is None

    def test_oov_terms_skipped(self):
        emb = _tiny_embedding()
        np.testing.assert_allclose(mean_vector(emb, ["a", "zz"]), [1.0, 0.0])

    def test_similarity_is_cosine_of_means(self):
        emb = _tiny_embedding()
        got = set_similarity(["a", "b"], ["c"], emb)
        want = np.dot([0.5, 0.5], [1.0, 1.0]) / (
            np.linalg.norm([0.5, 0.5]) * np.linalg.norm([1.0, 1.0])
        )
        assert got == pytest.approx(want, abs=1e-12)

    def test_undefined_when_either_side_empty(self):
        emb = _tiny_embedding()
        assert set_similarity([], ["a"], emb) is None
        assert set_similarity(["a"], ["zz"], emb) is None

    @given(
        st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=4),
        st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=4),
    )
    def test_symmetric(self, left, right):
        emb = _tiny_embedding()
        assert set_similarity(left, right, emb) == pytest.approx(
            set_similarity(right, left, emb), abs=1e-12
        )
