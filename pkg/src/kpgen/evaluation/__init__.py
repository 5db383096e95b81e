"""Keyphrase quality metrics, retrieval-expansion evaluation, throughput."""

from kpgen.evaluation.bench import BenchResult, bench_throughput
from kpgen.evaluation.kp_metrics import (
    KpEvalResult,
    dedup_stemmed,
    evaluate_keyphrases,
    f1_at_k,
    recall_at_k,
    split_present_absent,
    stem_phrase_text,
)
from kpgen.evaluation.retrieval import (
    ExpansionSetting,
    Query,
    RetrievalEvalResult,
    eval_retrieval,
    expand_text,
    load_keyphrase_expansions,
    read_qrels,
    read_queries,
)

__all__ = [
    "BenchResult",
    "ExpansionSetting",
    "KpEvalResult",
    "Query",
    "RetrievalEvalResult",
    "bench_throughput",
    "dedup_stemmed",
    "eval_retrieval",
    "evaluate_keyphrases",
    "expand_text",
    "f1_at_k",
    "load_keyphrase_expansions",
    "read_qrels",
    "read_queries",
    "recall_at_k",
    "split_present_absent",
    "stem_phrase_text",
]
