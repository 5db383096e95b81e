"""Background collection: BM25 retrieval and per-document precomputation."""

from kpgen.corpus_index.bm25 import (
    EMPTY_NEIGHBORHOOD,
    Bm25Index,
    NeighborEntry,
    Neighborhood,
    build_bm25,
    retrieve_neighbors,
)
from kpgen.corpus_index.precompute import (
    GLOSSARY_MIN_SUPPORT,
    TOP_CANDIDATES_PER_DOC,
    Glossary,
    PrecomputedDocEntry,
    apply_glossary,
    build_glossary,
    doc_tagged_tokens,
    phrase_importance,
    precompute_entries,
)
from kpgen.corpus_index.store import (
    load_bm25,
    load_entries,
    manifest_is_current,
    read_manifest,
    save_bm25,
    save_entries,
)

__all__ = [
    "Bm25Index",
    "EMPTY_NEIGHBORHOOD",
    "GLOSSARY_MIN_SUPPORT",
    "Glossary",
    "NeighborEntry",
    "Neighborhood",
    "PrecomputedDocEntry",
    "TOP_CANDIDATES_PER_DOC",
    "apply_glossary",
    "build_bm25",
    "build_glossary",
    "doc_tagged_tokens",
    "load_bm25",
    "load_entries",
    "manifest_is_current",
    "phrase_importance",
    "precompute_entries",
    "read_manifest",
    "retrieve_neighbors",
    "save_bm25",
    "save_entries",
]
