"""Centroid-based multi-document summarization with utility-based evaluation."""

from .text import (
    Cluster,
    ClusterParseError,
    Document,
    GlobalIndex,
    Sentence,
    Token,
    cluster_from_dict,
    cluster_to_dict,
    document_from_dict,
    document_to_dict,
    global_order,
    parse_cluster,
    parse_document,
    tokenize,
    write_cluster,
)
from .lexstats import (
    IDF_FLOOR,
    Centroid,
    CentroidEntry,
    IdfModel,
    assign_document,
    build_centroid,
    build_idf,
    document_vector,
    incremental_cluster,
    load_idf,
    save_idf,
    write_centroid_csv,
)
from .summarizer import (
    DEFAULT_ENUMERATION_CAP,
    LEAD_CENTROID,
    PRESETS,
    PURE_CENTROID,
    RERANK_ITERATION_CAP,
    EnumerationCapError,
    Extract,
    ScoreWeights,
    SentenceScore,
    centroid_value,
    compression_size,
    enumerate_extracts,
    extract,
    extract_to_dict,
    first_sentence_overlap,
    lead_baseline,
    positional_value,
    redundancy_rerank,
    score_sentences,
    summary_text,
    word_overlap,
)
from .evaluation import (
    CsisTally,
    EvalConfig,
    EvalReport,
    EvaluationError,
    SentenceTally,
    SubsumptionAnnotation,
    SubsumptionGraph,
    UtilityAnnotation,
    agreement_curve,
    build_report,
    cross_judge_matrix,
    csis_agreement_tally,
    csis_consensus,
    extract_utility,
    ideal_extract,
    judge_extract,
    load_subsumption_annotation,
    load_utility_annotation,
    max_utility,
    mean_cross_judge,
    normalized_performance,
    percent_agreement,
    precision_recall,
    random_performance,
    report_cross_judge,
    report_random_performance,
    report_system_performance,
    report_to_dict,
    round_half_up,
    save_subsumption_annotation,
    save_utility_annotation,
    system_performance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
