"""Synthetic corpus generation and the benchmark orchestration."""

import numpy as np
import pytest

from docsim.corpus import DatasetSpec, word_count
from docsim.evaluation import EvalReport, MetricBlock
from docsim.harness import (
    METHODS,
    BenchmarkConfig,
    SyntheticSpec,
    dataset_seed,
    evaluate_dataset,
    generate_synthetic,
    run_benchmark,
    summarize_reports,
    tune_tfw_params,
)
from docsim.embeddings import TrainConfig, doc_train_config
from docsim.tfw2v import TfwParams

QUICK_SPEC = SyntheticSpec(
    num_topics=4,
    docs=90,
    vocab_per_topic=60,
    shared_vocab=200,
    doc_length=(50, 90),
    tags_per_doc=(3, 5),
    seed=21,
)


def quick_config(**overrides):
    defaults = dict(
        dataset=DatasetSpec(
            min_words=50, max_words=90, dataset_size=40, num_datasets=2, seed=21
        ),
        word_train=TrainConfig(dim=16, epochs=2, seed=21),
        doc_train=doc_train_config(dim=16, epochs=2, seed=21),
    )
    defaults.update(overrides)
    return BenchmarkConfig(**defaults)


class TestSyntheticSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"docs": 0},
            {"num_topics": 0},
            {"doc_length": (0, 5)},
            {"doc_length": (10, 5)},
            {"topic_mix": 0.0},
            {"topic_mix": 1.5},
            {"tags_per_doc": (0, 3)},
            {"zipf_exponent": -1.0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SyntheticSpec(**kwargs)


class TestGenerateSynthetic:
    def test_deterministic(self):
        assert generate_synthetic(QUICK_SPEC) == generate_synthetic(QUICK_SPEC)

    def test_seed_changes_output(self):
        other = SyntheticSpec(
            num_topics=4, docs=90, vocab_per_topic=60, shared_vocab=200,
            doc_length=(50, 90), tags_per_doc=(3, 5), seed=22,
        )
        assert generate_synthetic(QUICK_SPEC) != generate_synthetic(other)

    def test_shape_and_lengths(self):
        docs = generate_synthetic(QUICK_SPEC)
        assert len(docs) == 90
        assert [d.id for d in docs] == [f"doc-{i:06d}" for i in range(90)]
        for d in docs:
            assert 50 <= word_count(d) <= 90

    def test_tags_label_topic_and_cite_own_tokens(self):
        docs = generate_synthetic(QUICK_SPEC)
        for d in docs:
            assert 3 <= len(d.tags) <= 5
            assert d.tags[0].startswith("topic")
            topic = d.tags[0][-2:]
            tokens = set(d.text.split())
            for tag in d.tags[1:]:
                assert tag in tokens
                assert tag.startswith(f"t{topic}w")

    def test_every_document_is_evaluation_eligible(self):
        from docsim.corpus import eligible_documents

        docs = generate_synthetic(QUICK_SPEC)
        spec = DatasetSpec(min_words=50, max_words=90, dataset_size=45, num_datasets=2)
        assert len(eligible_documents(docs, spec)) == len(docs)


class TestDatasetSeed:
    def test_distinct_and_reproducible(self):
        seeds = [dataset_seed(1, i) for i in range(10)]
        assert len(set(seeds)) == 10
        assert seeds == [dataset_seed(1, i) for i in range(10)]

    def test_different_bases_do_not_collide_nearby(self):
        a = {dataset_seed(1, i) for i in range(10)}
        b = {dataset_seed(2, i) for i in range(10)}
        assert not (a & b)


class TestBenchmarkConfig:
    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError, match="unknown"):
            quick_config(methods=("tfidf", "bm25"))

    def test_rejects_empty_methods_and_bad_cutoffs(self):
        with pytest.raises(ValueError):
            quick_config(methods=())
        with pytest.raises(ValueError):
            quick_config(top_n=(0,))
        with pytest.raises(ValueError):
            quick_config(workers=0)

    def test_method_names_fixed(self):
        assert METHODS == ("tfidf", "avgwv", "d2v", "tfw2v")


@pytest.fixture(scope="module")
def quick_run():
    docs = generate_synthetic(QUICK_SPEC)
    return run_benchmark(docs, quick_config(top_n=(5, 10)))


class TestRunBenchmark:
    def test_report_grid_complete(self, quick_run):
        run = quick_run
        assert run.dataset_names == ["ds00", "ds01"]
        assert len(run.reports) == len(METHODS) * 2
        seen = {(r.method, r.dataset) for r in run.reports}
        assert seen == {(m, d) for m in METHODS for d in ("ds00", "ds01")}
        for rep in run.reports:
            assert set(rep.metrics) == {5, 10}

    def test_dataset_isolation(self, quick_run):
        # re-scoring the first split alone reproduces the full run's rows
        from docsim.corpus import eligible_documents, sample_datasets

        config = quick_config(top_n=(5, 10))
        docs = generate_synthetic(QUICK_SPEC)
        datasets = sample_datasets(eligible_documents(docs, config.dataset),
                                   config.dataset)
        alone = evaluate_dataset(datasets[0], "ds00", config, seed_index=0)
        full = [r for r in quick_run.reports if r.dataset == "ds00"]
        for a, b in zip(alone, full):
            assert a.method == b.method
            for n in a.metrics:
                assert a.metrics[n] == b.metrics[n]

    def test_insufficient_corpus_raises(self):
        docs = generate_synthetic(QUICK_SPEC)[:50]
        with pytest.raises(ValueError):
            run_benchmark(docs, quick_config())

    def test_method_subset(self):
        docs = generate_synthetic(QUICK_SPEC)
        run = run_benchmark(docs, quick_config(methods=("tfidf",), top_n=(5,)))
        assert [r.method for r in run.reports] == ["tfidf", "tfidf"]


class TestSummarize:
    def test_means_per_method_and_cutoff(self):
        def rep(method, dataset, p):
            return EvalReport(
                method=method,
                dataset=dataset,
                num_queries=10,
                metrics={5: MetricBlock(precision=p, bleu_sum=2 * p, mae_loss=p / 2)},
            )

        reports = [rep("tfidf", "ds00", 0.2), rep("tfidf", "ds01", 0.4),
                   rep("d2v", "ds00", 0.6), rep("d2v", "ds01", 0.8)]
        summary = summarize_reports(reports)
        assert summary[("tfidf", 5)]["precision_mean"] == pytest.approx(0.3)
        assert summary[("d2v", 5)]["precision_mean"] == pytest.approx(0.7)
        assert summary[("tfidf", 5)]["bleu_sum_mean"] == pytest.approx(0.6)
        assert summary[("tfidf", 5)]["datasets"] == 2.0


class TestTuning:
    def test_single_point_grid_returned(self):
        docs = generate_synthetic(QUICK_SPEC)[:40]
        config = quick_config()
        only = TfwParams(alpha=0.0)
        assert tune_tfw_params(docs, config, grid=[only], n=5) == only

    def test_tie_keeps_earliest_grid_point(self):
        # alpha 0 twice: identical rankings, so scores tie exactly
        docs = generate_synthetic(QUICK_SPEC)[:40]
        config = quick_config()
        first = TfwParams(alpha=0.0, max_term=20)
        second = TfwParams(alpha=0.0, max_term=10)
        assert tune_tfw_params(docs, config, grid=[first, second], n=5) == first

    def test_empty_grid_rejected(self):
        docs = generate_synthetic(QUICK_SPEC)[:40]
        with pytest.raises(ValueError):
            tune_tfw_params(docs, quick_config(), grid=[], n=5)

    def test_run_benchmark_tune_changes_config(self):
        docs = generate_synthetic(QUICK_SPEC)
        grid = [TfwParams(alpha=0.0), TfwParams(alpha=0.15)]
        run = run_benchmark(
            docs, quick_config(top_n=(5,)), tune=True, tune_grid=grid
        )
        assert run.config.tfw in grid
