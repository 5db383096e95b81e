"""Corpus ingestion and reference-triplet construction.

Training triplets (reference, positive doc, negative doc) come from three
kinds of reference text: search queries with graded relevance judgments,
citing sentences, and paper titles.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

from kpgen.errors import DataError
from kpgen.ioutil import atomic_write_jsonl, iter_jsonl
from kpgen.textproc.tokenizer import TaggedToken, tagged_tokens_from_pairs


class RefType(str, Enum):
    QUERY = "query"
    CITATION = "citation"
    TITLE = "title"


@dataclass(frozen=True)
class Document:
    id: str
    title: str = ""
    abstract: str = ""
    gold_present: tuple[str, ...] | None = None
    gold_absent: tuple[str, ...] | None = None
    # pass-through POS mode: tokens supplied by a pre-tagged corpus
    tagged: tuple[TaggedToken, ...] | None = None

    @property
    def text(self) -> str:
        """Title and abstract joined by a space (the form used everywhere)."""
        if self.tagged is not None and not (self.title or self.abstract):
            return " ".join(t.surface for t in self.tagged)
        return f"{self.title} {self.abstract}".strip()


@dataclass(frozen=True)
class ReferenceTriplet:
    reference: str
    positive: Document
    negative: Document
    ref_type: RefType

    def __post_init__(self):
        if not self.reference.strip():
            raise DataError("triplet reference must be nonempty")
        if self.positive.id == self.negative.id:
            raise DataError(f"triplet positive and negative share id {self.positive.id!r}")


@dataclass
class BuilderStats:
    emitted: int = 0
    skipped: int = 0
    by_type: dict[str, int] = field(default_factory=dict)

    def count(self, ref_type: RefType) -> None:
        self.emitted += 1
        self.by_type[ref_type.value] = self.by_type.get(ref_type.value, 0) + 1


def document_from_record(record: dict, where: str = "corpus") -> Document:
    if "id" not in record:
        raise DataError(f"{where}: document record lacks 'id'")
    tagged = None
    if "tokens" in record:
        tagged = tuple(tagged_tokens_from_pairs(record["tokens"]))
    return Document(
        id=str(record["id"]),
        title=str(record.get("title", "")),
        abstract=str(record.get("abstract", "")),
        gold_present=_opt_tuple(record.get("present")),
        gold_absent=_opt_tuple(record.get("absent")),
        tagged=tagged,
    )


def _opt_tuple(value) -> tuple[str, ...] | None:
    return None if value is None else tuple(str(v) for v in value)


def load_corpus(path) -> list[Document]:
    """Read a JSON-lines corpus; duplicate ids are rejected."""
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, _, record in iter_jsonl(path):
        doc = document_from_record(record, where=f"{path}:{lineno}")
        if doc.id in seen:
            raise DataError(f"{path}:{lineno}: duplicate document id {doc.id!r}")
        seen.add(doc.id)
        docs.append(doc)
    return docs


# --------------------------------------------------------------------------
# triplet builders
# --------------------------------------------------------------------------

def triplets_from_query_relevance(
    records: Iterable[dict],
    per_query_cap: int = 4,
    stats: BuilderStats | None = None,
) -> Iterator[ReferenceTriplet]:
    """Queries with judged candidates: positives have relevance > 0,
    negatives relevance = 0; cross product capped per query."""
    for record in records:
        query = str(record.get("query", "")).strip()
        candidates = record.get("candidates", [])
        positives, negatives = [], []
        for cand in candidates:
            relevance = cand.get("relevance", 0)
            doc = document_from_record(cand["doc"], where="query candidates")
            if relevance > 0:
                positives.append(doc)
            elif relevance == 0:
                negatives.append(doc)
        if not query or not positives or not negatives:
            if stats:
                stats.skipped += 1
            continue
        emitted = 0
        for pos in positives:
            if emitted >= per_query_cap:
                break
            for neg in negatives:
                if emitted >= per_query_cap:
                    break
                if pos.id == neg.id:
                    continue
                if stats:
                    stats.count(RefType.QUERY)
                emitted += 1
                yield ReferenceTriplet(query, pos, neg, RefType.QUERY)


def triplets_from_citations(
    papers: Iterable[dict],
    stats: BuilderStats | None = None,
) -> Iterator[ReferenceTriplet]:
    """Citing sentences as references.

    A sentence is usable only when it carries exactly one citation group;
    the negative is a document cited in a different section (first by
    section order, then ascending id).
    """
    for paper in papers:
        cited_docs = {
            str(doc_id): document_from_record(rec, where="cited_docs")
            for doc_id, rec in paper.get("cited_docs", {}).items()
        }
        sections = paper.get("sections", [])
        cited_by_section: list[list[str]] = []
        for section in sections:
            ids: list[str] = []
            for sentence in section.get("sentences", []):
                for group in _citation_groups(sentence):
                    ids.extend(str(i) for i in group)
            cited_by_section.append(ids)

        for sec_idx, section in enumerate(sections):
            for sentence in section.get("sentences", []):
                text = str(sentence.get("text", "")).strip()
                groups = _citation_groups(sentence)
                if not text or len(groups) != 1:
                    if stats:
                        stats.skipped += 1
                    continue
                group = [str(i) for i in groups[0]]
                for pos_id in group:
                    positive = cited_docs.get(pos_id)
                    negative = _cross_section_negative(
                        cited_by_section, sec_idx, pos_id, cited_docs
                    )
                    if positive is None or negative is None:
                        if stats:
                            stats.skipped += 1
                        continue
                    triplet = ReferenceTriplet(text, positive, negative, RefType.CITATION)
                    if stats:
                        stats.count(RefType.CITATION)
                    yield triplet


def _citation_groups(sentence: dict) -> list[list]:
    """``cited_ids`` may be a flat list (one collective group) or a list of
    groups."""
    cited = sentence.get("cited_ids", [])
    if not cited:
        return []
    if all(isinstance(entry, list) for entry in cited):
        return [g for g in cited if g]
    return [list(cited)]


def _cross_section_negative(cited_by_section, sec_idx, pos_id, cited_docs) -> Document | None:
    for other_idx, ids in enumerate(cited_by_section):
        if other_idx == sec_idx:
            continue
        for neg_id in sorted(set(ids)):
            if neg_id != pos_id and neg_id in cited_docs:
                return cited_docs[neg_id]
    return None


def triplets_from_titles(
    papers: Iterable[dict],
    stats: BuilderStats | None = None,
) -> Iterator[ReferenceTriplet]:
    """Titles as references; the positive is the paper's own abstract and the
    negative the first cited abstract by id order."""
    for paper in papers:
        doc = document_from_record(paper["doc"], where="title builder")
        cited = [document_from_record(r, where="title builder cited") for r in paper.get("cited_docs", [])]
        negative = next(
            (c for c in sorted(cited, key=lambda d: d.id) if c.abstract.strip() and c.id != doc.id),
            None,
        )
        if not doc.title.strip() or not doc.abstract.strip() or negative is None:
            if stats:
                stats.skipped += 1
            continue
        triplet = ReferenceTriplet(
            reference=doc.title,
            positive=Document(id=doc.id, abstract=doc.abstract),
            negative=Document(id=negative.id, abstract=negative.abstract),
            ref_type=RefType.TITLE,
        )
        if stats:
            stats.count(RefType.TITLE)
        yield triplet


# --------------------------------------------------------------------------
# triplet persistence: triplet file + sidecar document store
# --------------------------------------------------------------------------

def save_triplets(triplets: Sequence[ReferenceTriplet], triplet_path, docs_path) -> None:
    """Write ``{"ref","pos_id","neg_id","type"}`` lines plus a sidecar store
    with every referenced document."""
    store: dict[str, Document] = {}
    for t in triplets:
        for doc in (t.positive, t.negative):
            existing = store.get(doc.id)
            if existing is None:
                store[doc.id] = doc
            elif existing != doc:
                raise DataError(f"conflicting content for document id {doc.id!r} in triplet store")
    atomic_write_jsonl(
        triplet_path,
        (
            {"ref": t.reference, "pos_id": t.positive.id, "neg_id": t.negative.id, "type": t.ref_type.value}
            for t in triplets
        ),
    )
    atomic_write_jsonl(
        docs_path,
        ({"id": d.id, "title": d.title, "abstract": d.abstract} for d in store.values()),
    )


def load_triplets(triplet_path, docs_path, types: set[RefType] | None = None) -> list[ReferenceTriplet]:
    """Load triplets, resolving documents from the sidecar store. ``types``
    filters reference types (ablation runs exclude types here, not in the
    builders)."""
    store = {doc.id: doc for doc in load_corpus(docs_path)}
    out: list[ReferenceTriplet] = []
    for lineno, _, record in iter_jsonl(triplet_path):
        where = f"{triplet_path}:{lineno}"
        try:
            ref_type = RefType(record["type"])
        except (KeyError, ValueError):
            raise DataError(f"{where}: bad triplet type {record.get('type')!r}")
        if types is not None and ref_type not in types:
            continue
        try:
            positive = store[record["pos_id"]]
            negative = store[record["neg_id"]]
        except KeyError as exc:
            raise DataError(f"{where}: triplet references unknown document {exc}") from exc
        out.append(ReferenceTriplet(record["ref"], positive, negative, ref_type))
    return out
