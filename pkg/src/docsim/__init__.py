"""Document similarity toolkit.

TF-IDF ranking, skip-gram word vectors and bag-of-words document
vectors trained from scratch, and an embedding-enriched re-ranking
step that blends feature-set similarity into the lexical scores.
Includes tag-based evaluation metrics, a synthetic corpus generator,
and a multi-dataset benchmark harness.
"""

from .baselines import DenseDocVector, avgwv_vector, avgwv_vectors, rank_dense
from .corpus import (
    DatasetSpec,
    Document,
    TokenizedDocument,
    eligible_documents,
    finnish_stopwords,
    load_corpus,
    load_stopwords,
    sample_datasets,
    save_corpus,
    tokenize,
    tokenize_documents,
    word_count,
)
from .embeddings import (
    DocEmbeddings,
    EmbeddingMatrix,
    TrainConfig,
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
from .evaluation import (
    EvalReport,
    GroundTruth,
    MetricBlock,
    bleu_at_n,
    bleu_unigram,
    build_ground_truth,
    evaluate_ranking,
    precision_at_n,
    ranking_loss_at_n,
    read_report_csv,
    write_report_csv,
)
from .harness import (
    METHODS,
    BenchmarkConfig,
    BenchmarkRun,
    SyntheticSpec,
    dataset_seed,
    evaluate_dataset,
    generate_synthetic,
    run_benchmark,
    summarize_reports,
    tune_tfw_params,
)
from .tfw2v import TfwParams, enrich_ranking, new_score, select_features, tfw2v_rank_all
from .vectorize import (
    SimilarityRanking,
    SparseVector,
    Vocabulary,
    build_vocabulary,
    cosine,
    load_ranking,
    load_vocabulary,
    rank_all,
    ranking_from_matrix,
    save_ranking,
    save_vocabulary,
    tfidf_vector,
    tfidf_vectors,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkConfig",
    "BenchmarkRun",
    "DatasetSpec",
    "DenseDocVector",
    "DocEmbeddings",
    "Document",
    "EmbeddingMatrix",
    "EvalReport",
    "GroundTruth",
    "METHODS",
    "MetricBlock",
    "SimilarityRanking",
    "SparseVector",
    "SyntheticSpec",
    "TfwParams",
    "TokenizedDocument",
    "TrainConfig",
    "Vocabulary",
    "avgwv_vector",
    "avgwv_vectors",
    "bleu_at_n",
    "bleu_unigram",
    "build_alias",
    "build_ground_truth",
    "build_vocabulary",
    "cosine",
    "dataset_seed",
    "doc_train_config",
    "eligible_documents",
    "enrich_ranking",
    "evaluate_dataset",
    "evaluate_ranking",
    "finnish_stopwords",
    "generate_synthetic",
    "load_corpus",
    "load_doc_embeddings",
    "load_ranking",
    "load_stopwords",
    "load_vocabulary",
    "load_word_embeddings",
    "mean_vector",
    "new_score",
    "precision_at_n",
    "rank_all",
    "rank_dense",
    "ranking_from_matrix",
    "ranking_loss_at_n",
    "read_report_csv",
    "run_benchmark",
    "sample_datasets",
    "save_corpus",
    "save_doc_embeddings",
    "save_ranking",
    "save_vocabulary",
    "save_word_embeddings",
    "select_features",
    "set_similarity",
    "summarize_reports",
    "tfidf_vector",
    "tfidf_vectors",
    "tfw2v_rank_all",
    "tokenize",
    "tokenize_documents",
    "train_pvdbow",
    "train_sgns",
    "tune_tfw_params",
    "word_count",
]
