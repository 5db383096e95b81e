"""In-memory BM25 inverted index over the background collection.

Okapi scoring with the Lucene-style idf ln(1 + (N - df + 0.5)/(df + 0.5)),
defaults k1 = 0.9, b = 0.4. Scores are nonnegative; documents sharing no
query term never appear in results.
"""

import math
from dataclasses import dataclass
from typing import Sequence

from kpgen.datasets import Document
from kpgen.errors import DataError
from kpgen.textproc.tokenizer import word_tokens


@dataclass(frozen=True)
class NeighborEntry:
    doc_id: str
    score: float
    weight: float  # score normalized over the retrieved set


@dataclass(frozen=True)
class Neighborhood:
    source_id: str | None
    entries: tuple[NeighborEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


EMPTY_NEIGHBORHOOD = Neighborhood(source_id=None, entries=())


class Bm25Index:
    def __init__(self, doc_ids: Sequence[str], token_lists: Sequence[Sequence[str]],
                 k1: float = 0.9, b: float = 0.4):
        if not doc_ids:
            raise DataError("cannot build BM25 index over an empty corpus")
        if len(doc_ids) != len(token_lists):
            raise DataError("doc_ids and token_lists must align")
        if len(set(doc_ids)) != len(doc_ids):
            raise DataError("duplicate document ids in corpus")
        self.k1 = float(k1)
        self.b = float(b)
        self.doc_ids = list(doc_ids)
        self.doc_len = [len(tokens) for tokens in token_lists]
        self.n_docs = len(doc_ids)
        self.avgdl = sum(self.doc_len) / self.n_docs
        self._idx_of = {d: i for i, d in enumerate(self.doc_ids)}

        postings: dict[str, dict[int, int]] = {}
        for idx, tokens in enumerate(token_lists):
            for term in tokens:
                postings.setdefault(term, {})
                postings[term][idx] = postings[term].get(idx, 0) + 1
        # postings sorted by doc id for deterministic traversal
        self.postings: dict[str, list[tuple[int, int]]] = {
            term: sorted(entries.items(), key=lambda it: self.doc_ids[it[0]])
            for term, entries in postings.items()
        }

    @classmethod
    def from_documents(cls, docs: Sequence[Document], k1: float = 0.9, b: float = 0.4) -> "Bm25Index":
        return cls([d.id for d in docs], [word_tokens(d.text) for d in docs], k1=k1, b=b)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._idx_of

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        if df == 0:
            return 0.0
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))

    def search(self, query_tokens: Sequence[str], n: int,
               exclude_id: str | None = None) -> list[tuple[str, float]]:
        """Top-n ``(doc_id, score)`` by BM25, score descending then doc id
        ascending; query term multiplicity counts."""
        if n <= 0:
            return []
        scores: dict[int, float] = {}
        for term in query_tokens:
            plist = self.postings.get(term)
            if not plist:
                continue
            idf = self.idf(term)
            for idx, tf in plist:
                dl = self.doc_len[idx]
                denom = tf + self.k1 * (1.0 - self.b + self.b * dl / self.avgdl)
                scores[idx] = scores.get(idx, 0.0) + idf * tf * (self.k1 + 1.0) / denom
        if exclude_id is not None:
            excluded = self._idx_of.get(exclude_id)
            if excluded is not None:
                scores.pop(excluded, None)
        ranked = sorted(scores.items(), key=lambda it: (-it[1], self.doc_ids[it[0]]))
        return [(self.doc_ids[idx], score) for idx, score in ranked[:n]]


def build_bm25(docs: Sequence[Document], k1: float = 0.9, b: float = 0.4) -> Bm25Index:
    return Bm25Index.from_documents(docs, k1=k1, b=b)


def retrieve_neighbors(index: Bm25Index, doc: Document, n: int) -> Neighborhood:
    """Top-n related documents for ``doc`` with normalized similarities.

    The document itself is excluded when present in the index. If the total
    score is not positive the neighborhood is empty.
    """
    if n <= 0:
        return Neighborhood(source_id=doc.id, entries=())
    hits = index.search(word_tokens(doc.text), n, exclude_id=doc.id)
    total = sum(score for _, score in hits)
    if total <= 0.0:
        return Neighborhood(source_id=doc.id, entries=())
    entries = tuple(
        NeighborEntry(doc_id=doc_id, score=score, weight=score / total) for doc_id, score in hits
    )
    return Neighborhood(source_id=doc.id, entries=entries)
