"""Command-line interface: the full pipeline as subcommands.

Subcommands: generate, sample, train, rank, evaluate, benchmark. Every
flag has a config-file fallback: the file is flat ``key = value`` text
(``#`` comments allowed), flags override file values, and built-in
defaults fill the rest. Exit codes: 0 success, 1 invalid usage or
configuration, 2 missing input file.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .baselines import avgwv_vectors, rank_dense
from .corpus import (
    DatasetSpec,
    eligible_documents,
    finnish_stopwords,
    load_corpus,
    load_stopwords,
    sample_datasets,
    save_corpus,
    tokenize_documents,
)
from .embeddings import (
    TrainConfig,
    load_doc_embeddings,
    load_word_embeddings,
    save_doc_embeddings,
    save_word_embeddings,
    train_pvdbow,
    train_sgns,
)
from .evaluation import build_ground_truth, evaluate_ranking, write_report_csv
from .harness import (
    METHODS,
    BenchmarkConfig,
    SyntheticSpec,
    generate_synthetic,
    run_benchmark,
    summarize_reports,
)
from .tfw2v import TfwParams, tfw2v_rank_all
from .vectorize import (
    build_vocabulary,
    load_ranking,
    rank_all,
    save_ranking,
    save_vocabulary,
    tfidf_vectors,
)


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int(text: str) -> int:
    return int(text)


def _float(text: str) -> float:
    return float(text)


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _pair(text: str) -> tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated integers, got {text!r}")
    return int(parts[0]), int(parts[1])


def _int_list(text: str) -> tuple[int, ...]:
    values = tuple(int(p.strip()) for p in text.split(",") if p.strip())
    if not values:
        raise ValueError(f"expected comma-separated integers, got {text!r}")
    return values


def _str_list(text: str) -> tuple[str, ...]:
    values = tuple(p.strip() for p in text.split(",") if p.strip())
    if not values:
        raise ValueError(f"expected a comma-separated list, got {text!r}")
    return values


_CONFIG_KEYS = frozenset(
    {
        # paths
        "corpus", "stopwords", "out",
        # global
        "seed", "workers", "deterministic", "brevity_penalty", "methods", "top_n",
        # dataset sampling
        "min_words", "max_words", "dataset_size", "num_datasets",
        # word-vector training
        "dim", "window", "negatives", "epochs", "min_count",
        "initial_lr", "final_lr",
        # doc-vector training
        "doc_dim", "doc_window", "doc_negatives", "doc_epochs", "doc_min_count",
        "doc_initial_lr", "doc_final_lr",
        # re-ranking
        "min_weight", "max_term", "alpha", "candidate_cutoff",
        # synthetic generation
        "docs", "num_topics", "vocab_per_topic", "shared_vocab", "doc_length",
        "topic_mix", "tags_per_doc", "zipf_exponent",
    }
)


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat key = value lines; # starts a comment; unknown keys rejected."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}: line {lineno}: expected 'key = value'")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}: line {lineno}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


class Settings:
    """Effective configuration: defaults, overridden by file, then flags."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        config = getattr(args, "config", None)
        self.file = parse_config_file(config) if config else {}

    def get(self, key: str, convert, default=None, flag: str | None = None):
        value = getattr(self.args, key if flag is None else flag, None)
        if value is not None:
            return value
        if key in self.file:
            try:
                return convert(self.file[key])
            except ValueError as exc:
                raise UsageError(f"config key {key!r}: {exc}") from exc
        return default

    def seed(self) -> int:
        return self.get("seed", _int, 1)

    def workers(self) -> int:
        if self.get("deterministic", _bool, False, flag="deterministic"):
            return 1
        return self.get("workers", _int, 1)

    def stopwords(self) -> frozenset[str]:
        value = self.get("stopwords", str)
        if value is None or value == "finnish":
            return finnish_stopwords()
        if value == "none":
            return frozenset()
        return load_stopwords(value)

    def dataset_spec(self) -> DatasetSpec:
        return DatasetSpec(
            min_words=self.get("min_words", _int, 200),
            max_words=self.get("max_words", _int, 600),
            dataset_size=self.get("dataset_size", _int, 2000),
            num_datasets=self.get("num_datasets", _int, 10),
            seed=self.seed(),
        )

    def train_config(self, model: str) -> TrainConfig:
        if model == "word":
            prefix, dim, epochs = "", 128, 20
        else:
            prefix, dim, epochs = "doc_", 100, 30
        return TrainConfig(
            dim=self.get(f"{prefix}dim", _int, dim, flag="dim"),
            window=self.get(f"{prefix}window", _int, 5, flag="window"),
            negatives=self.get(f"{prefix}negatives", _int, 5, flag="negatives"),
            epochs=self.get(f"{prefix}epochs", _int, epochs, flag="epochs"),
            min_count=self.get(f"{prefix}min_count", _int, 2, flag="min_count"),
            initial_lr=self.get(f"{prefix}initial_lr", _float, 0.025, flag="initial_lr"),
            final_lr=self.get(f"{prefix}final_lr", _float, 0.0001, flag="final_lr"),
            seed=self.seed(),
        )

    def tfw_params(self) -> TfwParams:
        return TfwParams(
            min_weight=self.get("min_weight", _float, 0.08),
            max_term=self.get("max_term", _int, 20),
            alpha=self.get("alpha", _float, 0.1),
        )

    def top_n_values(self, default=(30, 100)) -> tuple[int, ...]:
        flag = getattr(self.args, "top_n", None)
        if flag:
            return tuple(flag)
        return tuple(self.get("top_n", _int_list, default, flag="_missing"))

    def required(self, key: str, what: str, flag: str | None = None) -> str:
        value = self.get(key, str, flag=flag)
        if value is None:
            raise UsageError(f"{what} is required (flag --{key.replace('_', '-')} "
                             f"or config key {key!r})")
        return value


def cmd_generate(s: Settings) -> int:
    out = s.required("out", "an output corpus path")
    spec = SyntheticSpec(
        num_topics=s.get("num_topics", _int, 10),
        docs=s.get("docs", _int, 2000),
        vocab_per_topic=s.get("vocab_per_topic", _int, 300),
        shared_vocab=s.get("shared_vocab", _int, 2000),
        doc_length=s.get("doc_length", _pair, (200, 600)),
        topic_mix=s.get("topic_mix", _float, 0.6),
        tags_per_doc=s.get("tags_per_doc", _pair, (3, 6)),
        zipf_exponent=s.get("zipf_exponent", _float, 1.0),
        seed=s.seed(),
    )
    docs = generate_synthetic(spec)
    save_corpus(docs, out)
    print(
        f"generated {len(docs)} documents, {spec.num_topics} topics, "
        f"seed {spec.seed} -> {out}"
    )
    return 0


def cmd_sample(s: Settings) -> int:
    corpus_path = s.required("corpus", "a corpus path")
    out_dir = Path(s.required("out", "an output directory", flag="out_dir"))
    docs = load_corpus(corpus_path)
    spec = s.dataset_spec()
    datasets = sample_datasets(eligible_documents(docs, spec), spec)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, dataset in enumerate(datasets):
        save_corpus(dataset, out_dir / f"ds{i:02d}.jsonl")
    print(
        f"sampled {len(datasets)} disjoint datasets of {spec.dataset_size} "
        f"from {len(docs)} documents -> {out_dir}"
    )
    return 0


def cmd_train(s: Settings) -> int:
    corpus_path = s.required("corpus", "a corpus path", flag="dataset")
    out = s.required("out", "an output model path")
    model = s.args.model
    toks = tokenize_documents(load_corpus(corpus_path), s.stopwords())
    config = s.train_config(model)
    workers = s.workers()
    t0 = time.perf_counter()
    if model == "word":
        emb = train_sgns(toks, config, workers)
        save_word_embeddings(emb, out)
        size, what, final_lr = len(emb), "terms", emb.final_lr
    else:
        demb = train_pvdbow(toks, config, workers)
        save_doc_embeddings(demb, out)
        size, what, final_lr = len(demb), "documents", demb.final_lr
    print(
        f"trained {model} vectors: {size} {what}, dim {config.dim}, "
        f"{config.epochs} epochs, seed {config.seed}, final lr {final_lr:.6f}, "
        f"{time.perf_counter() - t0:.1f}s -> {out}"
    )
    return 0


def _single_top_n(s: Settings) -> int | None:
    flag = getattr(s.args, "top_n", None)
    if flag:
        if len(flag) > 1:
            raise UsageError("rank takes a single --top-n value")
        return flag[0]
    values = s.get("top_n", _int_list, None, flag="_missing")
    if values and len(values) == 1:
        return values[0]
    return None


def cmd_rank(s: Settings) -> int:
    corpus_path = s.required("corpus", "a corpus path", flag="dataset")
    out = s.required("out", "an output ranking path")
    method = s.args.method
    docs = load_corpus(corpus_path)
    toks = tokenize_documents(docs, s.stopwords())
    vocab = build_vocabulary(toks)
    vectors = tfidf_vectors(toks, vocab)
    top_n = _single_top_n(s)
    workers = s.workers()
    detail = ""

    if method == "tfidf":
        ranking = rank_all(vectors, top_n)
    elif method in ("avgwv", "tfw2v"):
        if s.args.wordvecs:
            emb = load_word_embeddings(s.args.wordvecs)
        else:
            emb = train_sgns(toks, s.train_config("word"), workers)
        if method == "avgwv":
            ranking = rank_dense(avgwv_vectors(vectors, vocab, emb), top_n)
        else:
            params = s.tfw_params()
            cutoff = s.get("candidate_cutoff", _int, None, flag="cutoff")
            ranking = tfw2v_rank_all(
                vectors, vocab, emb, params,
                candidate_cutoff=cutoff, top_n=top_n,
            )
            detail = (
                f" alpha={params.alpha} min_weight={params.min_weight} "
                f"max_term={params.max_term}"
                + (f" cutoff={cutoff}" if cutoff is not None else "")
            )
    else:
        if s.args.docvecs:
            demb = load_doc_embeddings(s.args.docvecs)
            if set(demb.doc_ids) != {d.id for d in docs}:
                raise ValueError(
                    f"{s.args.docvecs}: document vectors cover a different corpus"
                )
        else:
            demb = train_pvdbow(toks, s.train_config("doc"), workers)
        ranking = rank_dense(demb.as_dict(), top_n)

    if s.args.save_vocab:
        save_vocabulary(vocab, s.args.save_vocab)
    save_ranking(ranking, out)
    print(
        f"ranked {len(ranking.doc_ids)} documents, method={method}{detail}, "
        f"depth {ranking.depth} -> {out}"
    )
    return 0


def cmd_evaluate(s: Settings) -> int:
    corpus_path = s.required("corpus", "a corpus path", flag="dataset")
    ranking_path = s.required("ranking", "a ranking path", flag="ranking")
    docs = load_corpus(corpus_path)
    ranking = load_ranking(ranking_path)
    top_n = s.top_n_values()
    bp = s.get("brevity_penalty", _bool, True, flag="brevity_penalty")
    truth_path = s.args.truth
    cached = truth_path is not None and Path(truth_path).exists()
    if cached:
        truth = load_ranking(truth_path)
    else:
        truth = build_ground_truth(docs, brevity_penalty=bp)
        if truth_path is not None:
            save_ranking(truth, truth_path)
    method = s.args.method or "ranking"
    label = Path(corpus_path).stem
    report = evaluate_ranking(
        ranking, truth, top_n, method=method, dataset=label, dataset_size=len(docs)
    )
    out = s.get("out", str)
    if out:
        write_report_csv(
            [report], out,
            provenance={
                "corpus": corpus_path, "ranking": ranking_path, "method": method,
                "top_n": ",".join(str(n) for n in top_n),
                "brevity_penalty": bp,
                "truth": "cached" if cached else "rebuilt",
            },
        )
    else:
        for n in sorted(report.metrics):
            block = report.metrics[n]
            print(
                f"{method},{label},{n},{block.precision:.6f},"
                f"{block.bleu_sum:.6f},{block.mae_loss:.6f}"
            )
    parts = ", ".join(
        f"P@{n} {report.metrics[n].precision:.4f}" for n in sorted(report.metrics)
    )
    print(
        f"evaluated {method} on {label}: {parts}"
        + (f" -> {out}" if out else "")
    )
    return 0


def cmd_benchmark(s: Settings) -> int:
    out = s.required("out", "an output report path")
    spec = s.dataset_spec()
    corpus_path = s.get("corpus", str)
    if corpus_path:
        docs = load_corpus(corpus_path)
        source = corpus_path
    else:
        synth = SyntheticSpec(
            num_topics=s.get("num_topics", _int, 10),
            docs=s.get("docs", _int, spec.dataset_size * spec.num_datasets),
            vocab_per_topic=s.get("vocab_per_topic", _int, 300),
            shared_vocab=s.get("shared_vocab", _int, 2000),
            doc_length=s.get("doc_length", _pair, (200, 600)),
            topic_mix=s.get("topic_mix", _float, 0.6),
            tags_per_doc=s.get("tags_per_doc", _pair, (3, 6)),
            zipf_exponent=s.get("zipf_exponent", _float, 1.0),
            seed=s.seed(),
        )
        docs = generate_synthetic(synth)
        source = f"synthetic(docs={synth.docs},topics={synth.num_topics},seed={synth.seed})"
        print(f"generated synthetic corpus: {len(docs)} documents", file=sys.stderr)
    config = BenchmarkConfig(
        dataset=spec,
        tfw=s.tfw_params(),
        word_train=s.train_config("word"),
        doc_train=s.train_config("doc"),
        methods=tuple(s.get("methods", _str_list, METHODS, flag="methods")),
        top_n=s.top_n_values(),
        workers=s.workers(),
        brevity_penalty=s.get("brevity_penalty", _bool, True, flag="brevity_penalty"),
    )
    t0 = time.perf_counter()
    run = run_benchmark(
        docs,
        config,
        s.stopwords(),
        progress=lambda msg: print(msg, file=sys.stderr),
        tune=s.args.tune,
    )
    effective = run.config
    provenance = {
        "corpus": source,
        "methods": ",".join(run.methods),
        "datasets": len(run.dataset_names),
        "dataset_size": spec.dataset_size,
        "min_words": spec.min_words,
        "max_words": spec.max_words,
        "top_n": ",".join(str(n) for n in effective.top_n),
        "seed": s.seed(),
        "workers": effective.workers,
        "deterministic": effective.workers == 1,
        "brevity_penalty": effective.brevity_penalty,
        "tuned": bool(s.args.tune),
        "alpha": effective.tfw.alpha,
        "min_weight": effective.tfw.min_weight,
        "max_term": effective.tfw.max_term,
        "word_dim": effective.word_train.dim,
        "word_epochs": effective.word_train.epochs,
        "word_window": effective.word_train.window,
        "word_negatives": effective.word_train.negatives,
        "word_min_count": effective.word_train.min_count,
        "doc_dim": effective.doc_train.dim,
        "doc_epochs": effective.doc_train.epochs,
        "doc_negatives": effective.doc_train.negatives,
    }
    write_report_csv(run.reports, out, provenance)
    for (method, n), stats in sorted(summarize_reports(run.reports).items()):
        print(
            f"{method} n={n}: precision {stats['precision_mean']:.4f}, "
            f"bleu_sum {stats['bleu_sum_mean']:.2f}, "
            f"mae {stats['mae_loss_mean']:.4f}"
        )
    rows = sum(len(rep.metrics) for rep in run.reports)
    print(
        f"benchmark finished in {time.perf_counter() - t0:.0f}s: "
        f"{len(run.methods)} methods x {len(run.dataset_names)} datasets x "
        f"{len(effective.top_n)} cutoffs = {rows} rows -> {out}"
    )
    return 0


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--seed", type=int, help="base RNG seed (default 1)")
    p.add_argument("--workers", type=int, help="training thread count (default 1)")
    p.add_argument(
        "--deterministic", action="store_true", default=None,
        help="force single-threaded training for bit-reproducible output",
    )


def _add_stopwords(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--stopwords",
        help="stopword file path, 'finnish' (bundled default), or 'none'",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="docsim", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", metavar="COMMAND", required=True)

    p = sub.add_parser("generate", help="generate a synthetic tagged corpus")
    p.add_argument("--out", help="output corpus JSONL path")
    p.add_argument("--docs", type=int, help="number of documents")
    p.add_argument("--num-topics", type=int, dest="num_topics")
    p.add_argument("--vocab-per-topic", type=int, dest="vocab_per_topic")
    p.add_argument("--shared-vocab", type=int, dest="shared_vocab")
    p.add_argument("--doc-length", type=_pair, dest="doc_length", metavar="MIN,MAX")
    p.add_argument("--topic-mix", type=float, dest="topic_mix")
    p.add_argument("--tags-per-doc", type=_pair, dest="tags_per_doc", metavar="MIN,MAX")
    p.add_argument("--zipf-exponent", type=float, dest="zipf_exponent")
    _add_shared(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="split a corpus into disjoint datasets")
    p.add_argument("--corpus", help="input corpus JSONL path")
    p.add_argument("--out-dir", dest="out_dir", help="directory for dataset files")
    p.add_argument("--dataset-size", type=int, dest="dataset_size")
    p.add_argument("--num-datasets", type=int, dest="num_datasets")
    p.add_argument("--min-words", type=int, dest="min_words")
    p.add_argument("--max-words", type=int, dest="max_words")
    _add_shared(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("train", help="train word or document vectors")
    p.add_argument("--dataset", help="corpus JSONL to train on")
    p.add_argument("--model", choices=("word", "doc"), required=True)
    p.add_argument("--out", help="output model path")
    p.add_argument("--dim", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--negatives", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--min-count", type=int, dest="min_count")
    p.add_argument("--initial-lr", type=float, dest="initial_lr")
    p.add_argument("--final-lr", type=float, dest="final_lr")
    _add_stopwords(p)
    _add_shared(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("rank", help="rank every document against the corpus")
    p.add_argument("--dataset", help="corpus JSONL to rank")
    p.add_argument("--method", choices=METHODS, default="tfidf")
    p.add_argument("--out", help="output ranking TSV path")
    p.add_argument(
        "--top-n", dest="top_n", type=int, action="append",
        help="keep only the top N neighbors per document",
    )
    p.add_argument("--alpha", type=float)
    p.add_argument("--min-weight", type=float, dest="min_weight")
    p.add_argument("--max-term", type=int, dest="max_term")
    p.add_argument("--cutoff", type=int, help="enrich only the top-K candidates")
    p.add_argument("--wordvecs", help="pre-trained word vectors (else train in place)")
    p.add_argument("--docvecs", help="pre-trained doc vectors (else train in place)")
    p.add_argument("--dim", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--negatives", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--min-count", type=int, dest="min_count")
    p.add_argument("--initial-lr", type=float, dest="initial_lr")
    p.add_argument("--final-lr", type=float, dest="final_lr")
    p.add_argument("--save-vocab", dest="save_vocab", help="also write the vocabulary TSV")
    _add_stopwords(p)
    _add_shared(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="score a ranking against tag ground truth")
    p.add_argument("--dataset", help="corpus JSONL with tags")
    p.add_argument("--ranking", help="ranking TSV to evaluate")
    p.add_argument("--method", help="method label for the report")
    p.add_argument("--truth", help="ground-truth TSV cache (loaded if present, else written)")
    p.add_argument(
        "--top-n", dest="top_n", type=int, action="append",
        help="cutoff N; repeat for several (default 30 and 100)",
    )
    p.add_argument(
        "--no-brevity-penalty", dest="brevity_penalty",
        action="store_false", default=None,
    )
    p.add_argument("--out", help="report CSV path (default: print rows)")
    _add_shared(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="compare methods over sampled datasets")
    p.add_argument("--corpus", help="corpus JSONL (default: generate synthetic)")
    p.add_argument("--out", help="report CSV path")
    p.add_argument("--methods", type=_str_list, help="comma-separated method names")
    p.add_argument(
        "--top-n", dest="top_n", type=int, action="append",
        help="cutoff N; repeat for several (default 30 and 100)",
    )
    p.add_argument("--tune", action="store_true", default=False,
                   help="grid-search re-ranking parameters on the first dataset")
    p.add_argument("--dataset-size", type=int, dest="dataset_size")
    p.add_argument("--num-datasets", type=int, dest="num_datasets")
    p.add_argument("--min-words", type=int, dest="min_words")
    p.add_argument("--max-words", type=int, dest="max_words")
    p.add_argument("--alpha", type=float)
    p.add_argument("--min-weight", type=float, dest="min_weight")
    p.add_argument("--max-term", type=int, dest="max_term")
    p.add_argument("--docs", type=int, help="synthetic corpus size when generating")
    p.add_argument("--num-topics", type=int, dest="num_topics")
    p.add_argument(
        "--no-brevity-penalty", dest="brevity_penalty",
        action="store_false", default=None,
    )
    _add_stopwords(p)
    _add_shared(p)
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(Settings(args))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        name = exc.filename if exc.filename else exc
        print(f"error: missing file: {name}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
