"""Tag-based evaluation: BLEU ground truth and ranking metrics.

Documents carry human-assigned tags. The ground-truth ordering for a
query ranks every other document by the unigram BLEU of the query's tags
against the neighbor's tags (query as candidate, neighbor as reference).
Predicted rankings are then scored against that ordering with Top-N
precision, Top-N BLEU and a Top-N rank-displacement loss.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .corpus import Document
from .vectorize import SimilarityRanking, ranking_from_matrix

# Ground truth is an ordering like any other and shares the ranking type
# and its TSV format, so it can be cached and diffed with the same tools.
GroundTruth = SimilarityRanking


def bleu_unigram(candidate, reference, brevity_penalty: bool = True) -> float:
    """Unigram BLEU of one candidate tag list against one reference.

    Clipped precision: each candidate tag counts at most as often as it
    appears in the reference. Candidates shorter than the reference are
    damped by exp(1 - ref_len/cand_len) unless ``brevity_penalty`` is off.
    An empty candidate scores 0.0.
    """
    c = len(candidate)
    if c == 0:
        return 0.0
    ref_counts = Counter(reference)
    overlap = 0
    for tag, count in Counter(candidate).items():
        overlap += min(count, ref_counts[tag])
    p = overlap / c
    r = len(reference)
    if brevity_penalty and c < r:
        p *= math.exp(1.0 - r / c)
    return p


def _bleu_matrix_binary(tag_lists: list, brevity_penalty: bool) -> np.ndarray:
    """All-pairs BLEU when no tag list has duplicates.

    Overlaps are then plain set intersections, computed as one sparse
    product of the binary doc-tag incidence matrix.
    """
    tag_ids: dict[str, int] = {}
    rows: list[int] = []
    cols: list[int] = []
    for i, tags in enumerate(tag_lists):
        for tag in tags:
            rows.append(i)
            cols.append(tag_ids.setdefault(tag, len(tag_ids)))
    n = len(tag_lists)
    incidence = sp.csr_matrix(
        (np.ones(len(rows), dtype=np.float64), (rows, cols)),
        shape=(n, len(tag_ids)),
    )
    overlap = (incidence @ incidence.T).toarray()
    lengths = np.asarray([len(t) for t in tag_lists], dtype=np.float64)
    scores = overlap / lengths[:, None]
    if brevity_penalty:
        damp = np.exp(1.0 - lengths[None, :] / lengths[:, None])
        scores = np.where(lengths[:, None] < lengths[None, :], scores * damp, scores)
    return scores


def _bleu_matrix_scalar(tag_lists: list, brevity_penalty: bool) -> np.ndarray:
    n = len(tag_lists)
    scores = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            scores[i, j] = bleu_unigram(tag_lists[i], tag_lists[j], brevity_penalty)
    return scores


def build_ground_truth(
    docs: list[Document],
    brevity_penalty: bool = True,
    top_n: int | None = None,
) -> GroundTruth:
    """Rank every document's neighbors by tag BLEU.

    Every document must carry at least one tag. Rows order by descending
    BLEU with ties broken by ascending id, the same tie rule as every
    other ranking here.
    """
    for doc in docs:
        if not doc.tags:
            raise ValueError(f"document {doc.id!r} has no tags; cannot build ground truth")
    ordered = sorted(docs, key=lambda d: d.id)
    ids = [d.id for d in ordered]
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate document ids")
    tag_lists = [d.tags for d in ordered]
    if all(len(set(t)) == len(t) for t in tag_lists):
        scores = _bleu_matrix_binary(tag_lists, brevity_penalty)
    else:
        scores = _bleu_matrix_scalar(tag_lists, brevity_penalty)
    return ranking_from_matrix(ids, scores, top_n)


def precision_at_n(predicted_row, truth_row, n: int) -> float:
    """Fraction of the predicted top n found in the true top n.

    Rows are (doc_id, score) lists. Both must hold at least n entries.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if len(predicted_row) < n or len(truth_row) < n:
        raise ValueError(
            f"need {n} entries, got {len(predicted_row)} predicted "
            f"and {len(truth_row)} true"
        )
    predicted = {d for d, _ in predicted_row[:n]}
    true = {d for d, _ in truth_row[:n]}
    return len(predicted & true) / n


def bleu_at_n(
    query_tags, neighbor_tag_lists, n: int, brevity_penalty: bool = True
) -> float:
    """Mean tag BLEU of a query against its predicted top n neighbors."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if len(neighbor_tag_lists) < n:
        raise ValueError(f"need {n} neighbors, got {len(neighbor_tag_lists)}")
    total = 0.0
    for tags in neighbor_tag_lists[:n]:
        total += bleu_unigram(query_tags, tags, brevity_penalty)
    return total / n


def ranking_loss_at_n(predicted_row, truth_row, n: int, dataset_size: int) -> float:
    """Mean absolute rank displacement of the predicted top n.

    Positions are 1-based; each predicted neighbor's displacement is the
    gap to its position in the full true ordering, normalized by n times
    the dataset size so values are comparable across dataset sizes.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if len(predicted_row) < n:
        raise ValueError(f"need {n} entries, got {len(predicted_row)}")
    true_pos = {d: i + 1 for i, (d, _) in enumerate(truth_row)}
    total = 0
    for i, (d, _) in enumerate(predicted_row[:n]):
        if d not in true_pos:
            raise ValueError(f"document {d!r} missing from the ground-truth row")
        total += abs((i + 1) - true_pos[d])
    return total / (n * dataset_size)


def truth_positions(truth: GroundTruth) -> np.ndarray:
    """1-based rank of every document within every truth row.

    Entry [q, j] is the position of document j in query q's row; the
    diagonal (self) is -1. Requires full-depth truth rows.
    """
    n = len(truth.doc_ids)
    if truth.depth != n - 1:
        raise ValueError("ground truth must rank every other document")
    pos = np.full((n, n), -1, dtype=np.int32)
    ranks = np.arange(1, n, dtype=np.int32)
    pos[np.arange(n)[:, None], truth.neighbor_idx] = ranks[None, :]
    return pos


@dataclass(frozen=True)
class MetricBlock:
    """Dataset-level metrics at one cutoff.

    precision and mae_loss are means over queries; bleu_sum is the sum
    over queries of each query's mean top-n BLEU.
    """

    precision: float
    bleu_sum: float
    mae_loss: float


@dataclass
class EvalReport:
    method: str
    dataset: str
    num_queries: int
    metrics: dict[int, MetricBlock]


def evaluate_ranking(
    ranking: SimilarityRanking,
    truth: GroundTruth,
    n_values,
    method: str = "",
    dataset: str = "",
    dataset_size: int | None = None,
) -> EvalReport:
    """Score a predicted ranking against ground truth at several cutoffs.

    Vectorized over queries; agrees exactly with the per-query metric
    functions for precision and loss, and to float64 reduction order for
    BLEU. ``dataset_size`` defaults to the number of ranked documents.
    """
    if ranking.doc_ids != truth.doc_ids:
        raise ValueError("ranking and ground truth cover different document sets")
    pos = truth_positions(truth)
    nq = len(ranking.doc_ids)
    size = nq if dataset_size is None else dataset_size
    rows = np.arange(nq)[:, None]
    metrics: dict[int, MetricBlock] = {}
    for n in sorted(set(int(n) for n in n_values)):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if ranking.depth < n:
            raise ValueError(f"ranking depth {ranking.depth} is below n={n}")
        top = ranking.neighbor_idx[:, :n]
        p = pos[rows, top]
        precision = float(np.mean(np.sum(p <= n, axis=1) / n))
        expected = np.arange(1, n + 1, dtype=np.float64)
        mae = float(np.mean(np.sum(np.abs(p - expected[None, :]), axis=1) / (n * size)))
        bleu = float(np.sum(np.mean(truth.scores[rows, p - 1], axis=1)))
        metrics[n] = MetricBlock(precision=precision, bleu_sum=bleu, mae_loss=mae)
    return EvalReport(
        method=method, dataset=dataset, num_queries=nq, metrics=metrics
    )


def write_report_csv(
    reports: list[EvalReport], path: str | Path, provenance: dict | None = None
) -> None:
    """Write reports as CSV, optionally preceded by '# key=value' comment
    lines recording how the numbers were produced."""
    with open(path, "w", encoding="utf-8") as fh:
        if provenance:
            for key, value in provenance.items():
                fh.write(f"# {key}={value}\n")
        fh.write("method,dataset,n,precision_mean,bleu_sum,mae_loss\n")
        for rep in reports:
            for n in sorted(rep.metrics):
                block = rep.metrics[n]
                fh.write(
                    f"{rep.method},{rep.dataset},{n},{block.precision:.6f},"
                    f"{block.bleu_sum:.6f},{block.mae_loss:.6f}\n"
                )


def read_report_csv(path: str | Path) -> list[dict]:
    """Read a report CSV back as row dicts, skipping comment lines."""
    rows: list[dict] = []
    with open(path, encoding="utf-8") as fh:
        header: list[str] | None = None
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            values = line.split(",")
            row: dict = dict(zip(header, values))
            row["n"] = int(row["n"])
            for key in ("precision_mean", "bleu_sum", "mae_loss"):
                row[key] = float(row[key])
            rows.append(row)
    if header is None:
        raise ValueError(f"{path}: empty report")
    return rows
