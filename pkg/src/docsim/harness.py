"""Benchmark orchestration and a synthetic tagged-corpus generator.

The generator builds corpora with topical structure: each document draws
one primary topic, a ``topic_mix`` fraction of its tokens from that
topic's private vocabulary and the rest from a shared pool, both with
Zipfian rank-frequency weights. Tags are the topic label plus the
document's most frequent topic tokens, so tag overlap correlates with
lexical overlap and rankings have a meaningful ground truth.

The benchmark filters a corpus to evaluation-eligible documents, splits
them into disjoint datasets, and scores each requested method on each
dataset against the tag ground truth. Embeddings are trained per dataset
(nothing leaks across splits) with seeds derived from the base seed and
the dataset index. Parameter tuning, when used, runs on the first
dataset only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from operator import attrgetter

import numpy as np

from .baselines import avgwv_vectors, rank_dense
from .corpus import (
    DatasetSpec,
    Document,
    eligible_documents,
    sample_datasets,
    tokenize_documents,
)
from .embeddings import (
    TrainConfig,
    doc_train_config,
    train_pvdbow,
    train_sgns,
)
from .evaluation import EvalReport, build_ground_truth, evaluate_ranking
from .tfw2v import TfwParams, tfw2v_rank_all
from .vectorize import build_vocabulary, rank_all, tfidf_vectors

METHODS = ("tfidf", "avgwv", "d2v", "tfw2v")


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of a generated corpus.

    Token and id formats are fixed and sortable: topic tokens
    ``t<topic>w<rank>``, shared tokens ``sw<rank>``, topic labels
    ``topic<k>``, document ids ``doc-<number>``, all zero-padded.
    """

    num_topics: int = 10
    docs: int = 2000
    vocab_per_topic: int = 300
    shared_vocab: int = 2000
    doc_length: tuple[int, int] = (200, 600)
    topic_mix: float = 0.6
    tags_per_doc: tuple[int, int] = (3, 6)
    zipf_exponent: float = 1.0
    seed: int = 1

    def __post_init__(self) -> None:
        if self.docs < 1:
            raise ValueError(f"docs must be >= 1, got {self.docs}")
        if self.num_topics < 1:
            raise ValueError(f"num_topics must be >= 1, got {self.num_topics}")
        if self.vocab_per_topic < 1 or self.shared_vocab < 1:
            raise ValueError("vocabulary pools must be non-empty")
        lo, hi = self.doc_length
        if lo < 1 or hi < lo:
            raise ValueError(f"need 1 <= min <= max doc length, got {self.doc_length}")
        if not 0.0 < self.topic_mix <= 1.0:
            raise ValueError(f"topic_mix must be in (0, 1], got {self.topic_mix}")
        tlo, thi = self.tags_per_doc
        if tlo < 1 or thi < tlo:
            raise ValueError(f"need 1 <= min <= max tags, got {self.tags_per_doc}")
        if self.zipf_exponent < 0:
            raise ValueError(f"zipf_exponent must be >= 0, got {self.zipf_exponent}")


def _zipf_cdf(size: int, exponent: float) -> np.ndarray:
    weights = 1.0 / np.arange(1, size + 1, dtype=np.float64) ** exponent
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


def generate_synthetic(spec: SyntheticSpec = SyntheticSpec()) -> list[Document]:
    """Generate a corpus; the same spec always yields the same documents."""
    rng = np.random.default_rng(spec.seed)
    topic_tokens = [
        np.array(
            [f"t{k:02d}w{r:03d}" for r in range(spec.vocab_per_topic)], dtype=object
        )
        for k in range(spec.num_topics)
    ]
    shared_tokens = np.array(
        [f"sw{r:04d}" for r in range(spec.shared_vocab)], dtype=object
    )
    topic_cdf = _zipf_cdf(spec.vocab_per_topic, spec.zipf_exponent)
    shared_cdf = _zipf_cdf(spec.shared_vocab, spec.zipf_exponent)
    lo, hi = spec.doc_length
    tags_lo, tags_hi = spec.tags_per_doc

    out: list[Document] = []
    for i in range(spec.docs):
        topic = int(rng.integers(spec.num_topics))
        length = int(rng.integers(lo, hi + 1))
        from_topic = rng.random(length) < spec.topic_mix
        n_topic = int(from_topic.sum())
        topic_draws = np.searchsorted(topic_cdf, rng.random(n_topic), side="right")
        shared_draws = np.searchsorted(
            shared_cdf, rng.random(length - n_topic), side="right"
        )
        tokens = np.empty(length, dtype=object)
        tokens[from_topic] = topic_tokens[topic][topic_draws]
        tokens[~from_topic] = shared_tokens[shared_draws]

        num_tags = int(rng.integers(tags_lo, tags_hi + 1))
        ranks, counts = np.unique(topic_draws, return_counts=True)
        # most frequent topic tokens, count ties by ascending rank
        order = np.lexsort((ranks, -counts))
        top = [topic_tokens[topic][r] for r in ranks[order][: num_tags - 1]]
        out.append(
            Document(
                id=f"doc-{i:06d}",
                text=" ".join(tokens.tolist()),
                tags=(f"topic{topic:02d}", *top),
            )
        )
    return out


@dataclass
class BenchmarkConfig:
    """Everything a benchmark run depends on, fixed up front."""

    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    tfw: TfwParams = field(default_factory=TfwParams)
    word_train: TrainConfig = field(default_factory=TrainConfig)
    doc_train: TrainConfig = field(default_factory=doc_train_config)
    methods: tuple[str, ...] = METHODS
    top_n: tuple[int, ...] = (30, 100)
    workers: int = 1
    brevity_penalty: bool = True

    def __post_init__(self) -> None:
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if not self.methods:
            raise ValueError("at least one method is required")
        if not self.top_n or any(n < 1 for n in self.top_n):
            raise ValueError(f"top_n cutoffs must be >= 1, got {self.top_n}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass
class BenchmarkRun:
    dataset_names: list[str]
    methods: tuple[str, ...]
    config: BenchmarkConfig
    reports: list[EvalReport]


def dataset_seed(base_seed: int, index: int) -> int:
    """Per-dataset training seed: distinct and reproducible."""
    return base_seed + 1000003 * index


def evaluate_dataset(
    dataset: list[Document],
    name: str,
    config: BenchmarkConfig,
    stopwords: frozenset[str] = frozenset(),
    seed_index: int = 0,
    progress=None,
) -> list[EvalReport]:
    """Score every configured method on one dataset.

    The dataset is self-contained: models are trained on these documents
    only, and the ground truth is shared by all methods.
    """

    def log(msg: str) -> None:
        if progress is not None:
            progress(f"[{name}] {msg}")

    toks = tokenize_documents(dataset, stopwords)
    vocab = build_vocabulary(toks)
    vectors = tfidf_vectors(toks, vocab)
    truth = build_ground_truth(dataset, config.brevity_penalty)

    base = None
    if "tfidf" in config.methods or "tfw2v" in config.methods:
        t0 = time.perf_counter()
        base = rank_all(vectors)
        log(f"tfidf ranking in {time.perf_counter() - t0:.1f}s")
    word_emb = None
    if "avgwv" in config.methods or "tfw2v" in config.methods:
        t0 = time.perf_counter()
        word_cfg = replace(
            config.word_train, seed=dataset_seed(config.word_train.seed, seed_index)
        )
        word_emb = train_sgns(toks, word_cfg, config.workers)
        log(
            f"word vectors ({len(word_emb)} terms, dim {word_emb.dim}) "
            f"in {time.perf_counter() - t0:.1f}s"
        )

    reports = []
    for method in config.methods:
        t0 = time.perf_counter()
        if method == "tfidf":
            ranking = base
        elif method == "avgwv":
            ranking = rank_dense(avgwv_vectors(vectors, vocab, word_emb))
        elif method == "d2v":
            doc_cfg = replace(
                config.doc_train, seed=dataset_seed(config.doc_train.seed, seed_index)
            )
            demb = train_pvdbow(toks, doc_cfg, config.workers)
            ranking = rank_dense(demb.as_dict())
        else:
            ranking = tfw2v_rank_all(vectors, vocab, word_emb, config.tfw, base=base)
        report = evaluate_ranking(
            ranking,
            truth,
            config.top_n,
            method=method,
            dataset=name,
            dataset_size=len(dataset),
        )
        log(f"{method} scored in {time.perf_counter() - t0:.1f}s")
        reports.append(report)
    return reports


def run_benchmark(
    docs: list[Document],
    config: BenchmarkConfig = BenchmarkConfig(),
    stopwords: frozenset[str] = frozenset(),
    progress=None,
    tune: bool = False,
    tune_grid: list[TfwParams] | None = None,
) -> BenchmarkRun:
    """Run every configured method over every sampled dataset.

    Raises if the corpus has too few eligible documents for the requested
    split. Reports come back dataset-major, one per (dataset, method).
    With ``tune`` the re-ranking parameters are grid-searched on the
    first dataset before any dataset is scored; the returned run carries
    the tuned config.
    """
    eligible = eligible_documents(docs, config.dataset)
    datasets = sample_datasets(eligible, config.dataset)
    names = [f"ds{i:02d}" for i in range(len(datasets))]
    if tune:
        tuned = tune_tfw_params(
            datasets[0],
            config,
            stopwords,
            grid=tune_grid,
            n=min(config.top_n),
            progress=progress,
        )
        if progress is not None:
            progress(f"[tune] selected {tuned}")
        config = replace(config, tfw=tuned)
    reports: list[EvalReport] = []
    for i, (name, dataset) in enumerate(zip(names, datasets)):
        reports.extend(
            evaluate_dataset(
                dataset, name, config, stopwords, seed_index=i, progress=progress
            )
        )
    return BenchmarkRun(
        dataset_names=names, methods=config.methods, config=config, reports=reports
    )


def summarize_reports(
    reports: list[EvalReport],
) -> dict[tuple[str, int], dict[str, float]]:
    """Cross-dataset means per (method, n): precision, bleu_sum, mae_loss."""
    grouped: dict[str, list[EvalReport]] = {}
    for rep in sorted(reports, key=attrgetter("method", "dataset")):
        grouped.setdefault(rep.method, []).append(rep)
    summary: dict[tuple[str, int], dict[str, float]] = {}
    for method, group in grouped.items():
        for n in sorted(group[0].metrics):
            blocks = [rep.metrics[n] for rep in group]
            summary[(method, n)] = {
                "precision_mean": sum(b.precision for b in blocks) / len(blocks),
                "bleu_sum_mean": sum(b.bleu_sum for b in blocks) / len(blocks),
                "mae_loss_mean": sum(b.mae_loss for b in blocks) / len(blocks),
                "datasets": float(len(blocks)),
            }
    return summary


def default_tuning_grid() -> list[TfwParams]:
    alphas = (0.05, 0.1, 0.2, 0.3)
    min_weights = (0.05, 0.08, 0.12)
    max_terms = (10, 20)
    return [
        TfwParams(min_weight=w, max_term=m, alpha=a)
        for a in alphas
        for w in min_weights
        for m in max_terms
    ]


def tune_tfw_params(
    dataset: list[Document],
    config: BenchmarkConfig,
    stopwords: frozenset[str] = frozenset(),
    grid: list[TfwParams] | None = None,
    n: int = 30,
    progress=None,
) -> TfwParams:
    """Pick the grid point with the best Top-n precision on one dataset.

    Meant to run on the first dataset only, so tuning never sees the
    splits it is judged on. Ties keep the earliest grid point.
    """
    if grid is None:
        grid = default_tuning_grid()
    if not grid:
        raise ValueError("tuning grid is empty")
    toks = tokenize_documents(dataset, stopwords)
    vocab = build_vocabulary(toks)
    vectors = tfidf_vectors(toks, vocab)
    truth = build_ground_truth(dataset, config.brevity_penalty)
    base = rank_all(vectors)
    word_cfg = replace(config.word_train, seed=dataset_seed(config.word_train.seed, 0))
    word_emb = train_sgns(toks, word_cfg, config.workers)
    best_params, best_score = None, -1.0
    for params in grid:
        ranking = tfw2v_rank_all(vectors, vocab, word_emb, params, base=base)
        report = evaluate_ranking(ranking, truth, [n], dataset_size=len(dataset))
        score = report.metrics[n].precision
        if progress is not None:
            progress(f"[tune] {params} -> precision@{n} {score:.4f}")
        if score > best_score:
            best_params, best_score = params, score
    return best_params
