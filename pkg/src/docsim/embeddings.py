"""Skip-gram and doc-vector training with negative sampling.

Both models are trained from scratch with compiled kernels. Randomness
comes from a counter-based splitmix64 generator seeded per (epoch, doc),
so a single-threaded run is exactly reproducible and a multi-threaded run
degrades only through benign update races, never through RNG sharing.
Negative draws use alias tables over the unigram^0.75 distribution, which
keeps sampling O(1) per draw and exact.

The learning rate decays linearly per corpus position from
``initial_lr`` to ``final_lr`` across all epochs, following the usual
word2vec schedule.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import config as numba_config
from numba import njit, prange, set_num_threads

from .corpus import TokenizedDocument
from .vectorize import cosine

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / float(1 << 53)


@njit(inline="always")
def _next(state):
    """Advance a splitmix64 state; returns (new_state, 64-bit output)."""
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return state, z


@njit(cache=True)
def _rng_outputs(seed, count):
    """Raw generator outputs from a given state, for verification."""
    out = np.empty(count, dtype=np.uint64)
    state = np.uint64(seed)
    for i in range(count):
        state, z = _next(state)
        out[i] = z
    return out


def build_alias(weights) -> tuple[np.ndarray, np.ndarray]:
    """Vose alias tables for O(1) draws from a discrete distribution.

    Returns (prob, alias): draw u ~ U[0,1), let x = u * n; the sample is
    floor(x) if the fractional part is below prob[floor(x)], else
    alias[floor(x)].
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a non-empty 1-d array")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must not all be zero")
    n = w.size
    # divide before scaling: w/total <= 1, so subnormal totals cannot overflow
    scaled = w / total * n
    prob = np.zeros(n, dtype=np.float64)
    alias = np.zeros(n, dtype=np.int32)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = (scaled[l] + scaled[s]) - 1.0
        if scaled[l] < 1.0:
            small.append(l)
        else:
            large.append(l)
    # leftovers are 1.0 up to rounding
    while large:
        prob[large.pop()] = 1.0
    while small:
        prob[small.pop()] = 1.0
    return prob, alias


@njit(cache=True, fastmath=True, parallel=True)
def _sgns_kernel(
    corpus,
    offsets,
    vin,
    vout,
    prob,
    alias,
    window,
    negatives,
    lr0,
    lr1,
    epochs,
    seed,
    lr_out,
):
    n_docs = offsets.shape[0] - 1
    n_tokens = corpus.shape[0]
    dim = vin.shape[1]
    vsize = prob.shape[0]
    total = np.int64(n_tokens) * np.int64(epochs)
    wu = np.uint64(window)
    for epoch in range(epochs):
        for d in prange(n_docs):
            state = np.uint64(seed) + np.uint64(epoch * n_docs + d + 1) * _MIX1
            state, _ = _next(state)
            neu = np.zeros(dim, dtype=np.float32)
            start = offsets[d]
            end = offsets[d + 1]
            for t in range(start, end):
                pos = np.int64(epoch) * np.int64(n_tokens) + np.int64(t)
                lr = lr0 * (1.0 - pos / total)
                if lr < lr1:
                    lr = lr1
                center = corpus[t]
                state, z = _next(state)
                b = np.int64(z % wu) + 1
                lo = t - b
                if lo < start:
                    lo = start
                hi = t + b
                if hi > end - 1:
                    hi = end - 1
                for c in range(lo, hi + 1):
                    if c == t:
                        continue
                    ctx = corpus[c]
                    for j in range(dim):
                        neu[j] = np.float32(0.0)
                    for k in range(negatives + 1):
                        if k == 0:
                            target = np.int64(ctx)
                            label = np.float32(1.0)
                        else:
                            state, z = _next(state)
                            u = np.float64(z >> _S11) * _INV53
                            x = u * vsize
                            i0 = np.int64(x)
                            if x - i0 < prob[i0]:
                                target = i0
                            else:
                                target = np.int64(alias[i0])
                            if target == ctx:
                                continue
                            label = np.float32(0.0)
                        f = np.float32(0.0)
                        for j in range(dim):
                            f += vin[center, j] * vout[target, j]
                        if f > np.float32(6.0):
                            g = (label - np.float32(1.0)) * np.float32(lr)
                        elif f < np.float32(-6.0):
                            g = label * np.float32(lr)
                        else:
                            sig = np.float32(1.0) / (np.float32(1.0) + np.exp(-f))
                            g = (label - sig) * np.float32(lr)
                        for j in range(dim):
                            tmp = vout[target, j]
                            neu[j] += g * tmp
                            vout[target, j] = tmp + g * vin[center, j]
                    for j in range(dim):
                        vin[center, j] += neu[j]
                if pos == total - 1:
                    lr_out[0] = lr


@njit(cache=True, fastmath=True, parallel=True)
def _pvdbow_kernel(
    corpus,
    offsets,
    dvec,
    vout,
    prob,
    alias,
    negatives,
    lr0,
    lr1,
    epochs,
    seed,
    lr_out,
):
    n_docs = offsets.shape[0] - 1
    n_tokens = corpus.shape[0]
    dim = dvec.shape[1]
    vsize = prob.shape[0]
    total = np.int64(n_tokens) * np.int64(epochs)
    for epoch in range(epochs):
        for d in prange(n_docs):
            state = np.uint64(seed) + np.uint64(epoch * n_docs + d + 1) * _MIX1
            state, _ = _next(state)
            neu = np.zeros(dim, dtype=np.float32)
            start = offsets[d]
            end = offsets[d + 1]
            for t in range(start, end):
                pos = np.int64(epoch) * np.int64(n_tokens) + np.int64(t)
                lr = lr0 * (1.0 - pos / total)
                if lr < lr1:
                    lr = lr1
                word = corpus[t]
                for j in range(dim):
                    neu[j] = np.float32(0.0)
                for k in range(negatives + 1):
                    if k == 0:
                        target = np.int64(word)
                        label = np.float32(1.0)
                    else:
                        state, z = _next(state)
                        u = np.float64(z >> _S11) * _INV53
                        x = u * vsize
                        i0 = np.int64(x)
                        if x - i0 < prob[i0]:
                            target = i0
                        else:
                            target = np.int64(alias[i0])
                        if target == word:
                            continue
                        label = np.float32(0.0)
                    f = np.float32(0.0)
                    for j in range(dim):
                        f += dvec[d, j] * vout[target, j]
                    if f > np.float32(6.0):
                        g = (label - np.float32(1.0)) * np.float32(lr)
                    elif f < np.float32(-6.0):
                        g = label * np.float32(lr)
                    else:
                        sig = np.float32(1.0) / (np.float32(1.0) + np.exp(-f))
                        g = (label - sig) * np.float32(lr)
                    for j in range(dim):
                        tmp = vout[target, j]
                        neu[j] += g * tmp
                        vout[target, j] = tmp + g * dvec[d, j]
                for j in range(dim):
                    dvec[d, j] += neu[j]
                if pos == total - 1:
                    lr_out[0] = lr


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters shared by word and doc-vector training."""

    dim: int = 128
    window: int = 5
    negatives: int = 5
    epochs: int = 20
    min_count: int = 2
    initial_lr: float = 0.025
    final_lr: float = 0.0001
    seed: int = 1

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.negatives < 1:
            raise ValueError(f"negatives must be >= 1, got {self.negatives}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {self.min_count}")
        if not self.initial_lr > self.final_lr > 0.0:
            raise ValueError(
                f"need initial_lr > final_lr > 0, got "
                f"({self.initial_lr}, {self.final_lr})"
            )


def doc_train_config(**overrides) -> TrainConfig:
    """Doc-vector training defaults: smaller vectors, longer schedule."""
    params: dict = {"dim": 100, "epochs": 30}
    params.update(overrides)
    return TrainConfig(**params)


@dataclass
class EmbeddingMatrix:
    """Trained term vectors. The input side is the embedding used downstream;
    output rows exist only as the training-time context representation."""

    vocab: dict[str, int]
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    final_lr: float | None = None

    def __contains__(self, term: str) -> bool:
        return term in self.vocab

    def __len__(self) -> int:
        return len(self.vocab)

    @property
    def dim(self) -> int:
        return int(self.input_vectors.shape[1])

    def vector(self, term: str) -> np.ndarray:
        return self.input_vectors[self.vocab[term]]


@dataclass
class DocEmbeddings:
    """One trained vector per document."""

    doc_ids: list[str]
    vectors: np.ndarray
    final_lr: float | None = None

    def __post_init__(self) -> None:
        self._id_to_row = {d: i for i, d in enumerate(self.doc_ids)}

    def __len__(self) -> int:
        return len(self.doc_ids)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def vector(self, doc_id: str) -> np.ndarray:
        return self.vectors[self._id_to_row[doc_id]]

    def as_dict(self) -> dict[str, np.ndarray]:
        return {d: self.vectors[i] for i, d in enumerate(self.doc_ids)}


def _training_vocab(
    docs: list[TokenizedDocument], min_count: int
) -> tuple[list[str], np.ndarray]:
    """Terms with corpus frequency >= min_count, most frequent first,
    frequency ties broken alphabetically."""
    counts: Counter[str] = Counter()
    for doc in docs:
        counts.update(doc.tokens)
    items = [(t, c) for t, c in counts.items() if c >= min_count]
    items.sort(key=lambda tc: (-tc[1], tc[0]))
    terms = [t for t, _ in items]
    freqs = np.asarray([c for _, c in items], dtype=np.float64)
    return terms, freqs


def _encode(
    docs: list[TokenizedDocument], term_to_id: dict[str, int]
) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(len(docs) + 1, dtype=np.int64)
    chunks = []
    for i, doc in enumerate(docs):
        enc = [term_to_id[t] for t in doc.tokens if t in term_to_id]
        chunks.append(np.asarray(enc, dtype=np.int32))
        offsets[i + 1] = offsets[i] + len(enc)
    corpus = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int32)
    return corpus, offsets


def _set_threads(workers: int) -> None:
    # set_num_threads cannot exceed the process launch-time thread count
    set_num_threads(max(1, min(workers, numba_config.NUMBA_NUM_THREADS)))


def _init_vectors(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    return (rng.random((rows, dim), dtype=np.float32) - 0.5) / dim


def train_sgns(
    docs: list[TokenizedDocument],
    config: TrainConfig = TrainConfig(),
    workers: int = 1,
) -> EmbeddingMatrix:
    """Train skip-gram negative-sampling word vectors.

    For each corpus position a window radius is drawn uniformly from
    [1, window]; each (center, context) pair gets one positive update and
    ``negatives`` sampled updates. With workers == 1 results are exactly
    reproducible for a given seed; with more workers document updates race
    benignly (hogwild) and results vary slightly between runs.
    """
    terms, freqs = _training_vocab(docs, config.min_count)
    if not terms:
        raise ValueError(
            f"no term reaches min_count={config.min_count}; corpus too small"
        )
    term_to_id = {t: i for i, t in enumerate(terms)}
    corpus, offsets = _encode(docs, term_to_id)
    rng = np.random.default_rng(config.seed)
    vin = _init_vectors(rng, len(terms), config.dim)
    vout = np.zeros((len(terms), config.dim), dtype=np.float32)
    prob, alias = build_alias(freqs**0.75)
    lr_out = np.zeros(1, dtype=np.float64)
    _set_threads(workers)
    _sgns_kernel(
        corpus,
        offsets,
        vin,
        vout,
        prob,
        alias,
        config.window,
        config.negatives,
        config.initial_lr,
        config.final_lr,
        config.epochs,
        config.seed,
        lr_out,
    )
    return EmbeddingMatrix(
        vocab=term_to_id,
        input_vectors=vin,
        output_vectors=vout,
        final_lr=float(lr_out[0]),
    )


def train_pvdbow(
    docs: list[TokenizedDocument],
    config: TrainConfig | None = None,
    workers: int = 1,
) -> DocEmbeddings:
    """Train distributed bag-of-words document vectors.

    Each document vector is trained to predict the document's own words
    against negative samples; word order and windows play no role. Word
    vocabulary filtering and the update rule match word training. Documents
    with no in-vocabulary tokens keep their random initialization.
    """
    if config is None:
        config = doc_train_config()
    terms, freqs = _training_vocab(docs, config.min_count)
    if not terms:
        raise ValueError(
            f"no term reaches min_count={config.min_count}; corpus too small"
        )
    term_to_id = {t: i for i, t in enumerate(terms)}
    corpus, offsets = _encode(docs, term_to_id)
    rng = np.random.default_rng(config.seed)
    dvec = _init_vectors(rng, len(docs), config.dim)
    vout = np.zeros((len(terms), config.dim), dtype=np.float32)
    prob, alias = build_alias(freqs**0.75)
    lr_out = np.zeros(1, dtype=np.float64)
    _set_threads(workers)
    _pvdbow_kernel(
        corpus,
        offsets,
        dvec,
        vout,
        prob,
        alias,
        config.negatives,
        config.initial_lr,
        config.final_lr,
        config.epochs,
        config.seed,
        lr_out,
    )
    return DocEmbeddings(
        doc_ids=[d.id for d in docs], vectors=dvec, final_lr=float(lr_out[0])
    )


def mean_vector(emb: EmbeddingMatrix, terms) -> np.ndarray | None:
    """Mean input vector of the in-vocabulary terms, in float64.

    Returns None when no term is in vocabulary; repeated terms count once
    per occurrence."""
    rows = [emb.vocab[t] for t in terms if t in emb.vocab]
    if not rows:
        return None
    return np.mean(emb.input_vectors[rows].astype(np.float64), axis=0)


def set_similarity(terms_a, terms_b, emb: EmbeddingMatrix) -> float | None:
    """Cosine similarity of two term sets via their mean vectors.

    Undefined (None) when either set has no in-vocabulary term; the caller
    decides how an undefined comparison backs off.
    """
    ma = mean_vector(emb, terms_a)
    mb = mean_vector(emb, terms_b)
    if ma is None or mb is None:
        return None
    return cosine(ma, mb)


def _save_vectors(path: str | Path, names: list[str], matrix: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(names)} {matrix.shape[1]}\n")
        for name, row in zip(names, matrix):
            fh.write(name)
            for x in row:
                fh.write(f" {x:.8e}")
            fh.write("\n")


def _load_vectors(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected a 'count dim' header line")
        count, dim = int(header[0]), int(header[1])
        names: list[str] = []
        matrix = np.empty((count, dim), dtype=np.float32)
        for i in range(count):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: expected {count} vector rows, found {i}")
            # names may contain spaces, so split values off the right
            parts = line.rstrip("\n").rsplit(" ", dim)
            if len(parts) != dim + 1:
                raise ValueError(f"{path}: line {i + 2}: expected {dim} values")
            names.append(parts[0])
            matrix[i] = np.asarray(parts[1:], dtype=np.float32)
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: duplicate row names")
    return names, matrix


def save_word_embeddings(emb: EmbeddingMatrix, path: str | Path) -> None:
    """Write input vectors as text: a 'count dim' header, then one term and
    its values per line. Output vectors are training state and not kept."""
    terms = sorted(emb.vocab, key=emb.vocab.get)
    _save_vectors(path, terms, emb.input_vectors)


def load_word_embeddings(path: str | Path) -> EmbeddingMatrix:
    names, matrix = _load_vectors(path)
    return EmbeddingMatrix(
        vocab={t: i for i, t in enumerate(names)},
        input_vectors=matrix,
        output_vectors=np.zeros_like(matrix),
        final_lr=None,
    )


def save_doc_embeddings(demb: DocEmbeddings, path: str | Path) -> None:
    _save_vectors(path, demb.doc_ids, demb.vectors)


def load_doc_embeddings(path: str | Path) -> DocEmbeddings:
    names, matrix = _load_vectors(path)
    return DocEmbeddings(doc_ids=names, vectors=matrix, final_lr=None)
