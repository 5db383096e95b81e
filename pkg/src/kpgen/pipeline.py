"""Keyphrase generation: candidate assembly, scoring, ranking.

Candidates are the document's own noun phrases plus a capped pool of
precomputed candidates from BM25-retrieved related documents. Each
candidate is scored as

    score = position_bonus * phraseness^exponent * informativeness

with phraseness an interpolated membership probability over candidate
sets, informativeness an interpolated aggregate of predicted term weights,
and the position bonus favoring early first occurrence (exactly 1 for
phrases absent from the document). Scores are intentionally unnormalized;
only the ranking matters.
"""

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from kpgen.corpus_index.bm25 import Bm25Index, Neighborhood, retrieve_neighbors
from kpgen.corpus_index.precompute import (
    PrecomputedDocEntry,
    doc_tagged_tokens,
    phrase_importance,
)
from kpgen.datasets import Document
from kpgen.errors import ConfigError, DataError
from kpgen.term_importance.model import TermImportancePredictor
from kpgen.term_importance.sparse import SparseTermVector
from kpgen.textproc.chunker import CandidatePhrase, PhraseSource, chunk_noun_phrases
from kpgen.textproc.stem import stem
from kpgen.textproc.vocab import Vocabulary, to_term_ids


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = 0.8              # weight of the document itself in term importance
    beta: float = 0.8               # weight of the document itself in phraseness
    length_penalty: float = -0.25   # negative favors longer candidates
    phraseness_exponent: float = 1.5
    neighbors: int = 100
    candidate_cap: int = 100        # neighbor-sourced candidates kept overall
    per_neighbor_cap: int = 10      # candidates taken from each neighbor
    top_k: int = 10

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0 or not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"alpha and beta must lie in [0, 1], got {self.alpha}, {self.beta}")
        if self.length_penalty >= 1.0:
            raise ConfigError(
                f"length penalty must be < 1 so every phrase length exceeds it, got {self.length_penalty}"
            )
        if self.phraseness_exponent < 0.0:
            raise ConfigError(f"phraseness exponent must be >= 0, got {self.phraseness_exponent}")
        if self.neighbors < 0 or self.candidate_cap < 0 or self.per_neighbor_cap < 0:
            raise ConfigError("neighbors and caps must be >= 0")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")

    @property
    def extraction_mode(self) -> bool:
        """Both interpolation weights at 1 disables neighbor evidence
        entirely, equivalent to retrieving no related documents."""
        return self.alpha == 1.0 and self.beta == 1.0


@dataclass(frozen=True)
class ScoredKeyphrase:
    phrase: CandidatePhrase
    phraseness: float
    informativeness: float
    position_penalty: float
    score: float
    is_present: bool

    @property
    def text(self) -> str:
        return self.phrase.text


@dataclass(frozen=True)
class KeyphraseResult:
    doc_id: str
    present: tuple[ScoredKeyphrase, ...]
    absent: tuple[ScoredKeyphrase, ...]
    ranked: tuple[ScoredKeyphrase, ...]


def position_penalty(first_position: int | None) -> float:
    """1 + 1/log2(P + 2) for a phrase first seen after P words; exactly 1
    for absent phrases."""
    if first_position is None:
        return 1.0
    return 1.0 + 1.0 / math.log2(first_position + 2)


def find_stem_subsequence(doc_stems: Sequence[str], phrase_stems: Sequence[str]) -> int | None:
    """Word index of the first contiguous occurrence, or None."""
    m = len(phrase_stems)
    if m == 0 or m > len(doc_stems):
        return None
    first = phrase_stems[0]
    for i in range(len(doc_stems) - m + 1):
        if doc_stems[i] == first and list(doc_stems[i : i + m]) == list(phrase_stems):
            return i
    return None


@dataclass(frozen=True)
class NeighborCandidates:
    """One related document's contribution: its interpolation weight and its
    (capped) precomputed candidate set."""
    weight: float
    stems: frozenset[str]
    size: int


def neighbor_candidate_sets(
    neighborhood: Neighborhood,
    entries: Mapping[str, PrecomputedDocEntry],
    per_neighbor_cap: int,
) -> tuple[list[NeighborCandidates], dict[str, CandidatePhrase]]:
    """Resolve each neighbor's pruned candidate set, plus a pool mapping
    stem -> representative phrase (first neighbor wins)."""
    sets: list[NeighborCandidates] = []
    pool: dict[str, CandidatePhrase] = {}
    for neighbor in neighborhood:
        entry = entries.get(neighbor.doc_id)
        if entry is None:
            raise DataError(f"no precomputed entry for retrieved document {neighbor.doc_id!r}")
        if entry.pruned is None:
            raise DataError(f"entry for {neighbor.doc_id!r} lacks the glossary filtering pass")
        phrases = entry.pruned[:per_neighbor_cap]
        sets.append(
            NeighborCandidates(
                weight=neighbor.weight,
                stems=frozenset(p.stem for p in phrases),
                size=len(phrases),
            )
        )
        for phrase in phrases:
            pool.setdefault(phrase.stem, phrase)
    return sets, pool


def phraseness(
    stem_key: str,
    in_doc_set: bool,
    doc_set_size: int,
    neighbor_sets: Sequence[NeighborCandidates],
    beta: float,
) -> float:
    """Interpolated probability that the candidate is drawn from the
    document's noun phrases or a neighbor's candidate set (uniform over the
    distinct members of each set)."""
    own = (1.0 / doc_set_size) if (in_doc_set and doc_set_size > 0) else 0.0
    acc = 0.0
    for ns in neighbor_sets:
        if stem_key in ns.stems and ns.size > 0:
            acc += ns.weight * (1.0 / ns.size)
    return beta * own + (1.0 - beta) * acc


def informativeness(
    term_ids: Sequence[int],
    doc_vector: SparseTermVector,
    neighborhood: Neighborhood,
    entries: Mapping[str, PrecomputedDocEntry],
    alpha: float,
    length_penalty: float,
) -> float:
    """Aggregate interpolated term importance over the candidate's tokens
    (multiplicity counts), normalized by (length - length_penalty)."""
    total = 0.0
    for term_id in term_ids:
        acc = 0.0
        for neighbor in neighborhood:
            acc += neighbor.weight * entries[neighbor.doc_id].vector.get(term_id)
        total += alpha * doc_vector.get(term_id) + (1.0 - alpha) * acc
    return total / (len(term_ids) - length_penalty)


@dataclass(frozen=True)
class AssembledCandidate:
    phrase: CandidatePhrase
    phraseness: float
    in_doc_set: bool


def assemble_candidates(
    doc_phrases: Sequence[CandidatePhrase],
    doc_stems: Sequence[str],
    neighborhood: Neighborhood,
    entries: Mapping[str, PrecomputedDocEntry],
    config: PipelineConfig,
) -> list[AssembledCandidate]:
    """Union of the document's own phrases and the top-``candidate_cap``
    neighbor-pool phrases by phraseness (ties by stem).

    Deduplication is by stemmed identity, the document's own version
    winning. Neighbor-sourced phrases that occur in the document (as a
    contiguous stemmed token subsequence) get their real position.
    """
    doc_set = {p.stem for p in doc_phrases}
    doc_set_size = len(doc_set)
    neighbor_sets, pool = neighbor_candidate_sets(neighborhood, entries, config.per_neighbor_cap)

    def pn(stem_key: str) -> float:
        return phraseness(stem_key, stem_key in doc_set, doc_set_size, neighbor_sets, config.beta)

    survivors = sorted(pool, key=lambda s: (-pn(s), s))[: config.candidate_cap]

    out = [
        AssembledCandidate(phrase=p, phraseness=pn(p.stem), in_doc_set=True)
        for p in doc_phrases
    ]
    for stem_key in survivors:
        if stem_key in doc_set:
            continue
        phrase = pool[stem_key]
        hit = find_stem_subsequence(doc_stems, [stem(t) for t in phrase.tokens])
        phrase = replace(phrase, first_position=hit, source=PhraseSource.NEIGHBOR)
        out.append(AssembledCandidate(phrase=phrase, phraseness=pn(stem_key), in_doc_set=False))
    return out


class KeyphrasePipeline:
    """Holds the loaded index, precomputed entries, predictor, and
    vocabulary; generation is pure per document and safe to call
    concurrently."""

    def __init__(
        self,
        index: Bm25Index | None,
        entries: Mapping[str, PrecomputedDocEntry],
        predictor: TermImportancePredictor,
        vocab: Vocabulary,
        config: PipelineConfig,
        tagger=None,
    ):
        if config.neighbors > 0 and not config.extraction_mode and index is None:
            raise ConfigError("a BM25 index is required when related documents are used")
        self.index = index
        self.entries = entries
        self.predictor = predictor
        self.vocab = vocab
        self.config = config
        self.tagger = tagger

    def generate(self, doc: Document, config: PipelineConfig | None = None) -> KeyphraseResult:
        cfg = config or self.config
        tokens = doc_tagged_tokens(doc, self.tagger)
        if not tokens:
            raise DataError("empty document")
        doc_stems = [stem(t.surface) for t in tokens]
        doc_phrases = chunk_noun_phrases(tokens)

        if cfg.extraction_mode or cfg.neighbors == 0 or self.index is None:
            neighborhood = Neighborhood(source_id=doc.id, entries=())
        else:
            neighborhood = retrieve_neighbors(self.index, doc, cfg.neighbors)

        candidates = assemble_candidates(doc_phrases, doc_stems, neighborhood, self.entries, cfg)

        doc_vector = self.predictor.predict_vector(
            to_term_ids(self.vocab, [t.surface for t in tokens]), owner=doc.id
        )
        scored = []
        for cand in candidates:
            term_ids = (
                cand.phrase.term_ids
                if cand.phrase.term_ids is not None
                else tuple(to_term_ids(self.vocab, cand.phrase.tokens))
            )
            info = informativeness(
                term_ids, doc_vector, neighborhood, self.entries, cfg.alpha, cfg.length_penalty
            )
            omega = position_penalty(cand.phrase.first_position)
            score = omega * cand.phraseness**cfg.phraseness_exponent * info
            scored.append(
                ScoredKeyphrase(
                    phrase=cand.phrase,
                    phraseness=cand.phraseness,
                    informativeness=info,
                    position_penalty=omega,
                    score=score,
                    is_present=cand.phrase.first_position is not None,
                )
            )
        scored.sort(key=lambda s: (-s.score, s.phrase.stem))
        present = tuple(s for s in scored if s.is_present)[: cfg.top_k]
        absent = tuple(s for s in scored if not s.is_present)[: cfg.top_k]
        return KeyphraseResult(doc_id=doc.id, present=present, absent=absent, ranked=tuple(scored))
