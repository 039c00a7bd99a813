#!/usr/bin/env python3
"""Measure how well trained word vectors separate topics.

For each training seed, generates a fresh topic-structured corpus,
trains word vectors at default settings, and compares the mean cosine
of within-topic word pairs against cross-topic pairs. Healthy training
shows a large positive gap on every seed.
"""

import argparse
import sys
import time

import numpy as np

from docsim import SyntheticSpec, TrainConfig, generate_synthetic, tokenize_documents, train_sgns


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10, help="number of training seeds")
    ap.add_argument("--docs", type=int, default=2000)
    ap.add_argument("--topics", type=int, default=10)
    ap.add_argument("--pairs", type=int, default=100, help="word pairs per side")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--quick", action="store_true",
                    help="small corpus and short training, for a fast sanity pass")
    return ap.parse_args(argv)


def unit_cos(u, v) -> float:
    return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))


def sample_pairs(emb, rng, topics: int, pairs: int, within: bool) -> list[float]:
    # topic words are named t{topic:02d}w{rank:03d}; low ranks are frequent
    # enough to survive the min_count cut, so draw from the top 40
    out: list[float] = []
    while len(out) < pairs:
        if within:
            t1 = t2 = int(rng.integers(topics))
        else:
            t1, t2 = (int(t) for t in rng.choice(topics, 2, replace=False))
        a = f"t{t1:02d}w{int(rng.integers(0, 40)):03d}"
        b = f"t{t2:02d}w{int(rng.integers(0, 40)):03d}"
        if a != b and a in emb and b in emb:
            out.append(unit_cos(emb.vector(a), emb.vector(b)))
    return out


def main(argv=None) -> int:
    args = parse_args(argv)
    train = TrainConfig()
    if args.quick:
        args.seeds = min(args.seeds, 3)
        args.docs = min(args.docs, 300)
        train = TrainConfig(dim=48, epochs=6)

    print(f"{'seed':>4s} {'within':>8s} {'cross':>8s} {'gap':>8s} {'train_s':>8s}")
    gaps = []
    for seed in range(args.seeds):
        docs = generate_synthetic(
            SyntheticSpec(num_topics=args.topics, docs=args.docs, seed=200 + seed)
        )
        toks = tokenize_documents(docs)
        t0 = time.perf_counter()
        emb = train_sgns(toks, TrainConfig(
            dim=train.dim, epochs=train.epochs, seed=300 + seed
        ), workers=args.workers)
        elapsed = time.perf_counter() - t0
        rng = np.random.default_rng(seed)
        within = float(np.mean(sample_pairs(emb, rng, args.topics, args.pairs, True)))
        cross = float(np.mean(sample_pairs(emb, rng, args.topics, args.pairs, False)))
        gaps.append(within - cross)
        print(f"{seed:4d} {within:8.4f} {cross:8.4f} {within - cross:8.4f} {elapsed:8.1f}")

    print(f"\nmean gap {float(np.mean(gaps)):.4f} over {args.seeds} seeds "
          f"(min {min(gaps):.4f}, max {max(gaps):.4f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
