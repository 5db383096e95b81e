"""Per-document precomputation for the background collection.

Three passes, in order: (1) per-document sparse vector plus the ten most
informative candidate phrases, (2) glossary of phrases that reach the top
ten in at least ``min_support`` documents, (3) per-document candidate sets
filtered down to glossary members.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from kpgen.datasets import Document
from kpgen.errors import DataError
from kpgen.term_importance.model import TermImportancePredictor
from kpgen.term_importance.sparse import SparseTermVector
from kpgen.textproc.chunker import CandidatePhrase, chunk_noun_phrases
from kpgen.textproc.tokenizer import TaggedToken, tokenize
from kpgen.textproc.vocab import Vocabulary, to_term_ids

TOP_CANDIDATES_PER_DOC = 10
GLOSSARY_MIN_SUPPORT = 3


def phrase_importance(weights: SparseTermVector, term_ids: Sequence[int], length_penalty: float) -> float:
    """Length-normalized sum of the phrase's term weights:
    sum(w) / (len - length_penalty). Token multiplicity counts."""
    total = 0.0
    for term_id in term_ids:
        total += weights.get(term_id)
    return total / (len(term_ids) - length_penalty)


@dataclass(frozen=True)
class PrecomputedDocEntry:
    doc_id: str
    vector: SparseTermVector
    top: tuple[tuple[CandidatePhrase, float], ...]          # (phrase, importance), descending
    pruned: tuple[CandidatePhrase, ...] | None = None       # top ∩ glossary

    def __post_init__(self):
        if len(self.top) > TOP_CANDIDATES_PER_DOC:
            raise DataError(f"entry for {self.doc_id!r} keeps more than "
                            f"{TOP_CANDIDATES_PER_DOC} candidates")


@dataclass(frozen=True)
class Glossary:
    support: dict[str, int]
    min_support: int = GLOSSARY_MIN_SUPPORT

    def __contains__(self, stem: str) -> bool:
        return self.support.get(stem, 0) >= self.min_support

    def members(self) -> list[str]:
        return sorted(s for s, c in self.support.items() if c >= self.min_support)


def doc_tagged_tokens(doc: Document, tagger) -> list[TaggedToken]:
    """Tokens of a document: pass-through tags when pre-tagged, otherwise
    tokenize with the configured tagger."""
    if doc.tagged is not None:
        return list(doc.tagged)
    if tagger is None:
        raise DataError(f"document {doc.id!r} is untagged and no tagger is configured")
    return tokenize(doc.text, tagger)


def precompute_entries(
    docs: Sequence[Document],
    predictor: TermImportancePredictor,
    vocab: Vocabulary,
    tagger=None,
    length_penalty: float = -0.25,
    top_n: int = TOP_CANDIDATES_PER_DOC,
    threads: int = 1,
) -> list[PrecomputedDocEntry]:
    """Pass 1: vector and top-``top_n`` informative candidates per document.

    A document with no noun phrases yields an entry with an empty candidate
    list, which is valid.
    """

    def one(doc: Document) -> PrecomputedDocEntry:
        tokens = doc_tagged_tokens(doc, tagger)
        if not tokens:
            raise DataError(f"document {doc.id!r} has no tokens")
        vector = predictor.predict_vector(to_term_ids(vocab, [t.surface for t in tokens]), owner=doc.id)
        scored = []
        for phrase in chunk_noun_phrases(tokens):
            term_ids = tuple(to_term_ids(vocab, phrase.tokens))
            phrase = replace(phrase, term_ids=term_ids)
            scored.append((phrase, phrase_importance(vector, term_ids, length_penalty)))
        scored.sort(key=lambda it: (-it[1], it[0].stem))
        return PrecomputedDocEntry(doc_id=doc.id, vector=vector, top=tuple(scored[:top_n]))

    return list(_parallel_map(one, docs, threads))


def build_glossary(entries: Sequence[PrecomputedDocEntry],
                   min_support: int = GLOSSARY_MIN_SUPPORT) -> Glossary:
    """Pass 2: count, for each stemmed phrase, the documents whose top list
    contains it."""
    support: dict[str, int] = {}
    for entry in entries:
        for stem in {phrase.stem for phrase, _ in entry.top}:
            support[stem] = support.get(stem, 0) + 1
    return Glossary(support=support, min_support=min_support)


def apply_glossary(
    entries: Sequence[PrecomputedDocEntry],
    glossary: Glossary,
    threads: int = 1,
) -> list[PrecomputedDocEntry]:
    """Pass 3: keep only glossary members in each document's candidate set."""

    def one(entry: PrecomputedDocEntry) -> PrecomputedDocEntry:
        pruned = tuple(phrase for phrase, _ in entry.top if phrase.stem in glossary)
        return replace(entry, pruned=pruned)

    return list(_parallel_map(one, entries, threads))


def _parallel_map(fn: Callable, items: Sequence, threads: int):
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
