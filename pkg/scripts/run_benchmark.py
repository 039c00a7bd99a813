#!/usr/bin/env python3
"""Reproduce the headline method comparison on a synthetic corpus.

Generates a tagged corpus, splits it into disjoint datasets, scores
tfidf / avgwv / d2v / tfw2v on each, and writes one CSV row per
(method, dataset, cutoff). With --quick everything is shrunk so the
whole run takes well under a minute.
"""

import argparse
import sys
import time

from docsim import (
    BenchmarkConfig,
    DatasetSpec,
    SyntheticSpec,
    TfwParams,
    generate_synthetic,
    run_benchmark,
    summarize_reports,
)
from docsim.evaluation import write_report_csv


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="benchmark.csv", help="report CSV path")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--datasets", type=int, default=10)
    ap.add_argument("--dataset-size", type=int, default=2000)
    ap.add_argument("--topics", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--tune", action="store_true",
                    help="grid-search re-ranking parameters on the first dataset")
    ap.add_argument("--quick", action="store_true",
                    help="tiny corpus and short training, for a fast sanity pass")
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.quick:
        args.datasets = min(args.datasets, 2)
        args.dataset_size = min(args.dataset_size, 150)

    synth = SyntheticSpec(
        num_topics=args.topics,
        docs=args.dataset_size * args.datasets,
        seed=args.seed,
    )
    dataset = DatasetSpec(
        min_words=synth.doc_length[0],
        max_words=synth.doc_length[1],
        dataset_size=args.dataset_size,
        num_datasets=args.datasets,
        seed=args.seed,
    )
    config = BenchmarkConfig(dataset=dataset, tfw=TfwParams(), workers=args.workers)
    if args.quick:
        from dataclasses import replace

        config.word_train = replace(config.word_train, dim=48, epochs=5)
        config.doc_train = replace(config.doc_train, dim=32, epochs=5)

    print(f"generating {synth.docs} documents ({synth.num_topics} topics)")
    docs = generate_synthetic(synth)

    t0 = time.perf_counter()
    run = run_benchmark(
        docs, config, progress=lambda m: print(m, file=sys.stderr), tune=args.tune
    )
    elapsed = time.perf_counter() - t0

    write_report_csv(
        run.reports,
        args.out,
        provenance={
            "corpus": f"synthetic(docs={synth.docs},topics={synth.num_topics})",
            "seed": args.seed,
            "datasets": len(run.dataset_names),
            "dataset_size": dataset.dataset_size,
            "alpha": run.config.tfw.alpha,
            "min_weight": run.config.tfw.min_weight,
            "max_term": run.config.tfw.max_term,
            "tuned": args.tune,
            "elapsed_s": f"{elapsed:.0f}",
        },
    )

    print(f"\n{'method':8s} {'n':>4s} {'precision':>10s} {'bleu_sum':>10s} {'mae':>8s}")
    for (method, n), stats in sorted(summarize_reports(run.reports).items()):
        print(
            f"{method:8s} {n:4d} {stats['precision_mean']:10.4f} "
            f"{stats['bleu_sum_mean']:10.2f} {stats['mae_loss_mean']:8.4f}"
        )
    print(f"\n{len(run.reports)} reports in {elapsed:.0f}s -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
