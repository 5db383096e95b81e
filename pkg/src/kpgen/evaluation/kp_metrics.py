"""Groundtruth-based keyphrase metrics.

Both sides are stemmed and deduplicated before matching; a prediction
counts iff its stemmed string equals a stemmed gold string. Precision at k
always divides by k: a model predicting fewer than k phrases is treated as
having padded the list with wrong ones.
"""

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from kpgen.errors import DataError
from kpgen.textproc.stem import stem
from kpgen.textproc.tokenizer import word_tokens


def stem_phrase_text(phrase: str) -> str:
    """Stemmed identity of a free-text phrase."""
    return " ".join(stem(tok) for tok in word_tokens(phrase))


def dedup_stemmed(phrases: Sequence[str]) -> list[str]:
    """Stem each phrase and drop later duplicates, preserving order; empty
    stems (punctuation-only phrases) are dropped."""
    seen: set[str] = set()
    out: list[str] = []
    for phrase in phrases:
        stemmed = stem_phrase_text(phrase)
        if stemmed and stemmed not in seen:
            seen.add(stemmed)
            out.append(stemmed)
    return out


def f1_at_k(predicted: Sequence[str], gold: Sequence[str], k: int) -> tuple[float, float, float]:
    """(precision, recall, F1) at rank k with the fixed-k denominator."""
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    gold_set = set(dedup_stemmed(gold))
    if not gold_set:
        raise DataError("empty gold keyphrase list")
    top = dedup_stemmed(predicted)[:k]
    matches = sum(1 for p in top if p in gold_set)
    precision = matches / k
    recall = matches / len(gold_set)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def recall_at_k(predicted: Sequence[str], gold: Sequence[str], k: int) -> float:
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    gold_set = set(dedup_stemmed(gold))
    if not gold_set:
        raise DataError("empty gold keyphrase list")
    top = dedup_stemmed(predicted)[:k]
    return sum(1 for p in top if p in gold_set) / len(gold_set)


def split_present_absent(phrases: Sequence[str], doc_text: str) -> tuple[list[str], list[str]]:
    """Split gold phrases by the stemmed contiguous-subsequence rule."""
    doc_stems = [stem(t) for t in word_tokens(doc_text)]
    joined = " " + " ".join(doc_stems) + " "
    present, absent = [], []
    for phrase in phrases:
        stemmed = stem_phrase_text(phrase)
        if stemmed and f" {stemmed} " in joined:
            present.append(phrase)
        else:
            absent.append(phrase)
    return present, absent


@dataclass
class KpEvalResult:
    ks: tuple[int, ...]
    present_f1: dict[int, float] = field(default_factory=dict)
    absent_recall: dict[int, float] = field(default_factory=dict)
    present_doc_count: int = 0
    absent_doc_count: int = 0
    skipped_present: int = 0
    skipped_absent: int = 0
    per_doc: dict[str, dict] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "present_f1": {str(k): v for k, v in self.present_f1.items()},
            "absent_recall": {str(k): v for k, v in self.absent_recall.items()},
            "present_doc_count": self.present_doc_count,
            "absent_doc_count": self.absent_doc_count,
            "skipped_present": self.skipped_present,
            "skipped_absent": self.skipped_absent,
        }


def evaluate_keyphrases(
    predictions: Mapping[str, tuple[Sequence[str], Sequence[str]]],
    gold: Mapping[str, tuple[Sequence[str], Sequence[str]]],
    ks: Sequence[int] = (5, 10),
) -> KpEvalResult:
    """Macro-averaged F1@k over present phrases and recall@k over absent
    phrases. Documents with an empty gold side are skipped (and counted)
    for that side only.
    """
    result = KpEvalResult(ks=tuple(ks))
    f1_sums = {k: 0.0 for k in ks}
    rec_sums = {k: 0.0 for k in ks}
    for doc_id in sorted(gold):
        gold_present, gold_absent = gold[doc_id]
        pred_present, pred_absent = predictions.get(doc_id, ((), ()))
        detail: dict = {}
        if dedup_stemmed(gold_present):
            result.present_doc_count += 1
            for k in ks:
                p, r, f1 = f1_at_k(pred_present, gold_present, k)
                f1_sums[k] += f1
                detail[f"present_f1@{k}"] = f1
        else:
            result.skipped_present += 1
        if dedup_stemmed(gold_absent):
            result.absent_doc_count += 1
            for k in ks:
                rec = recall_at_k(pred_absent, gold_absent, k)
                rec_sums[k] += rec
                detail[f"absent_recall@{k}"] = rec
        else:
            result.skipped_absent += 1
        result.per_doc[doc_id] = detail
    for k in ks:
        if result.present_doc_count:
            result.present_f1[k] = f1_sums[k] / result.present_doc_count
        if result.absent_doc_count:
            result.absent_recall[k] = rec_sums[k] / result.absent_doc_count
    return result
