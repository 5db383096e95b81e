"""Retrieval-based evaluation: recall at rank k under keyphrase expansion.

Expansion appends each phrase string once (space separated) to the query
and/or document text before BM25 indexing, so the NONE setting is
bit-identical to plain BM25.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from kpgen.corpus_index.bm25 import Bm25Index
from kpgen.datasets import Document
from kpgen.errors import DataError
from kpgen.ioutil import iter_jsonl
from kpgen.textproc.tokenizer import word_tokens


class ExpansionSetting(str, Enum):
    NONE = "none"
    QUERY = "query"
    DOC = "doc"
    BOTH = "both"

    @property
    def expands_queries(self) -> bool:
        return self in (ExpansionSetting.QUERY, ExpansionSetting.BOTH)

    @property
    def expands_docs(self) -> bool:
        return self in (ExpansionSetting.DOC, ExpansionSetting.BOTH)


@dataclass(frozen=True)
class Query:
    id: str
    text: str


@dataclass
class RetrievalEvalResult:
    setting: ExpansionSetting
    k: int
    recall: float
    evaluated_queries: int
    skipped_queries: int
    per_query: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "setting": self.setting.value,
            "k": self.k,
            "recall": self.recall,
            "evaluated_queries": self.evaluated_queries,
            "skipped_queries": self.skipped_queries,
        }


def read_qrels(path) -> dict[str, set[str]]:
    """TREC qrels: ``qid  iteration  docid  relevance`` per line; documents
    with relevance > 0 are relevant."""
    qrels: dict[str, set[str]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: qrels line needs 4 fields, got {len(parts)}")
            qid, _, doc_id, rel = parts
            qrels.setdefault(qid, set())
            if int(rel) > 0:
                qrels[qid].add(doc_id)
    return qrels


def read_queries(path) -> list[Query]:
    queries = []
    for lineno, _, record in iter_jsonl(path):
        if "id" not in record or "text" not in record:
            raise DataError(f"{path}:{lineno}: query record needs 'id' and 'text'")
        queries.append(Query(id=str(record["id"]), text=str(record["text"])))
    return queries


def load_keyphrase_expansions(path, per_list: int = 10) -> dict[str, list[str]]:
    """Read a keyphrase output file into id -> expansion phrase list
    (top ``per_list`` present plus top ``per_list`` absent, each once)."""
    out: dict[str, list[str]] = {}
    for lineno, _, record in iter_jsonl(path):
        if "id" not in record:
            raise DataError(f"{path}:{lineno}: keyphrase record lacks 'id'")
        phrases: list[str] = []
        seen: set[str] = set()
        for side in ("present", "absent"):
            for item in record.get(side, [])[:per_list]:
                phrase = item["phrase"] if isinstance(item, dict) else str(item)
                if phrase not in seen:
                    seen.add(phrase)
                    phrases.append(phrase)
        out[str(record["id"])] = phrases
    return out


def expand_text(text: str, phrases: Sequence[str] | None) -> str:
    if not phrases:
        return text
    return text + " " + " ".join(phrases)


def eval_retrieval(
    docs: Sequence[Document],
    queries: Sequence[Query],
    qrels: Mapping[str, set[str]],
    setting: ExpansionSetting,
    doc_expansions: Mapping[str, Sequence[str]] | None = None,
    query_expansions: Mapping[str, Sequence[str]] | None = None,
    k: int = 1000,
    k1: float = 0.9,
    b: float = 0.4,
) -> RetrievalEvalResult:
    """Recall@k of BM25 retrieval under the chosen expansion setting,
    macro-averaged over queries with at least one judged-relevant document
    (others are skipped and counted)."""
    if setting.expands_docs and doc_expansions is None:
        raise DataError("document expansion requested but no document keyphrases given")
    if setting.expands_queries and query_expansions is None:
        raise DataError("query expansion requested but no query keyphrases given")

    doc_ids = [d.id for d in docs]
    texts = []
    for doc in docs:
        phrases = doc_expansions.get(doc.id) if setting.expands_docs else None
        texts.append(word_tokens(expand_text(doc.text, phrases)))
    index = Bm25Index(doc_ids, texts, k1=k1, b=b)

    result = RetrievalEvalResult(setting=setting, k=k, recall=0.0, evaluated_queries=0, skipped_queries=0)
    total = 0.0
    for query in queries:
        relevant = qrels.get(query.id, set())
        if not relevant:
            result.skipped_queries += 1
            continue
        phrases = query_expansions.get(query.id) if setting.expands_queries else None
        hits = index.search(word_tokens(expand_text(query.text, phrases)), k)
        retrieved = {doc_id for doc_id, _ in hits}
        recall = len(relevant & retrieved) / len(relevant)
        result.per_query[query.id] = recall
        total += recall
        result.evaluated_queries += 1
    result.recall = total / result.evaluated_queries if result.evaluated_queries else 0.0
    return result
