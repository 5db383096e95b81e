"""Index directory persistence.

Layout: ``bm25.jsonl`` (header line + one posting list per term),
``entries.jsonl``, ``glossary.txt`` (stem<TAB>support per line), and one
manifest per artifact carrying a format version, a config hash, and record
counts used to detect truncation.
"""

import json
import os
from pathlib import Path
from typing import Sequence

from kpgen.corpus_index.bm25 import Bm25Index
from kpgen.corpus_index.precompute import Glossary, PrecomputedDocEntry
from kpgen.errors import DataError
from kpgen.ioutil import atomic_write_jsonl, atomic_write_text, iter_jsonl
from kpgen.term_importance.sparse import vector_from_pairs
from kpgen.textproc.chunker import CandidatePhrase, PhraseSource

FORMAT_VERSION = 1

BM25_FILE = "bm25.jsonl"
BM25_MANIFEST = "bm25.manifest.json"
ENTRIES_FILE = "entries.jsonl"
ENTRIES_MANIFEST = "entries.manifest.json"
GLOSSARY_FILE = "glossary.txt"


def _write_manifest(path: Path, kind: str, config_hash: str, counts: dict) -> None:
    manifest = {
        "format": f"kpgen-{kind}",
        "version": FORMAT_VERSION,
        "config_hash": config_hash,
        "counts": counts,
    }
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path, kind: str) -> dict:
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: missing manifest")
    manifest = json.loads(path.read_text(encoding="utf-8"))
    if manifest.get("format") != f"kpgen-{kind}":
        raise DataError(f"{path}: expected a kpgen-{kind} manifest")
    if manifest.get("version") != FORMAT_VERSION:
        raise DataError(
            f"{path}: version mismatch (file {manifest.get('version')!r}, supported {FORMAT_VERSION})"
        )
    return manifest


def manifest_is_current(path, kind: str, config_hash: str) -> bool:
    try:
        return read_manifest(path, kind)["config_hash"] == config_hash
    except (DataError, KeyError, json.JSONDecodeError):
        return False


# --------------------------------------------------------------------------
# BM25
# --------------------------------------------------------------------------

def save_bm25(index_dir, index: Bm25Index, config_hash: str = "") -> None:
    index_dir = Path(index_dir)
    index_dir.mkdir(parents=True, exist_ok=True)
    header = {
        "k1": index.k1,
        "b": index.b,
        "doc_ids": index.doc_ids,
        "doc_len": index.doc_len,
    }
    lines = [header]
    for term in sorted(index.postings):
        lines.append({"t": term, "p": [[idx, tf] for idx, tf in index.postings[term]]})
    atomic_write_jsonl(index_dir / BM25_FILE, lines)
    _write_manifest(
        index_dir / BM25_MANIFEST,
        "bm25",
        config_hash,
        {"terms": len(index.postings), "docs": index.n_docs},
    )


def load_bm25(index_dir) -> Bm25Index:
    index_dir = Path(index_dir)
    manifest = read_manifest(index_dir / BM25_MANIFEST, "bm25")
    path = index_dir / BM25_FILE
    records = iter_jsonl(path)
    try:
        _, _, header = next(records)
    except StopIteration:
        raise DataError(f"{path}: empty index file")
    index = Bm25Index.__new__(Bm25Index)
    index.k1 = float(header["k1"])
    index.b = float(header["b"])
    index.doc_ids = list(header["doc_ids"])
    index.doc_len = [int(x) for x in header["doc_len"]]
    index.n_docs = len(index.doc_ids)
    if index.n_docs == 0:
        raise DataError(f"{path}: index holds no documents")
    index.avgdl = sum(index.doc_len) / index.n_docs
    index._idx_of = {d: i for i, d in enumerate(index.doc_ids)}
    index.postings = {}
    for _, _, record in records:
        index.postings[record["t"]] = [(int(i), int(tf)) for i, tf in record["p"]]
    expected = manifest["counts"]["terms"]
    if len(index.postings) != expected:
        raise DataError(
            f"{path}: truncated at byte {os.path.getsize(path)} "
            f"({len(index.postings)} of {expected} terms)"
        )
    return index


# --------------------------------------------------------------------------
# entries + glossary
# --------------------------------------------------------------------------

def _phrase_to_json(phrase: CandidatePhrase) -> dict:
    return {
        "tokens": list(phrase.tokens),
        "pos": phrase.first_position,
        "ids": list(phrase.term_ids) if phrase.term_ids is not None else None,
    }


def _phrase_from_json(obj: dict, source: PhraseSource) -> CandidatePhrase:
    return CandidatePhrase(
        tokens=tuple(obj["tokens"]),
        first_position=obj["pos"],
        source=source,
        term_ids=None if obj.get("ids") is None else tuple(obj["ids"]),
    )


def _entry_record(entry: PrecomputedDocEntry) -> dict:
    pruned_stems = {p.stem for p in entry.pruned} if entry.pruned is not None else set()
    return {
        "id": entry.doc_id,
        "v": [[t, w] for t, w in entry.vector.items()],
        "top": [{**_phrase_to_json(phrase), "f": f} for phrase, f in entry.top],
        "pruned": [i for i, (phrase, _) in enumerate(entry.top) if phrase.stem in pruned_stems],
    }


def save_entries(index_dir, entries: Sequence[PrecomputedDocEntry], glossary: Glossary,
                 config_hash: str = "") -> None:
    index_dir = Path(index_dir)
    index_dir.mkdir(parents=True, exist_ok=True)
    count = atomic_write_jsonl(index_dir / ENTRIES_FILE, (_entry_record(e) for e in entries))
    glossary_lines = [f"{stem}\t{glossary.support[stem]}" for stem in sorted(glossary.support)]
    atomic_write_text(index_dir / GLOSSARY_FILE, "".join(line + "\n" for line in glossary_lines))
    _write_manifest(
        index_dir / ENTRIES_MANIFEST,
        "entries",
        config_hash,
        {"entries": count, "glossary_terms": len(glossary.support),
         "glossary_min_support": glossary.min_support},
    )


def load_entries(index_dir) -> tuple[dict[str, PrecomputedDocEntry], Glossary]:
    index_dir = Path(index_dir)
    manifest = read_manifest(index_dir / ENTRIES_MANIFEST, "entries")
    path = index_dir / ENTRIES_FILE
    entries: dict[str, PrecomputedDocEntry] = {}
    for lineno, _, record in iter_jsonl(path):
        where = f"{path}:{lineno}"
        try:
            vector = vector_from_pairs(record["v"], owner=record["id"])
            top = tuple(
                (_phrase_from_json(obj, PhraseSource.NEIGHBOR), float(obj["f"]))
                for obj in record["top"]
            )
            pruned = tuple(top[i][0] for i in record["pruned"])
            entry = PrecomputedDocEntry(
                doc_id=record["id"], vector=vector, top=top, pruned=pruned
            )
        except (KeyError, IndexError, TypeError) as exc:
            raise DataError(f"{where}: malformed precomputed entry: {exc!r}") from exc
        if entry.doc_id in entries:
            raise DataError(f"{where}: duplicate entry for document {entry.doc_id!r}")
        entries[entry.doc_id] = entry
    expected = manifest["counts"]["entries"]
    if len(entries) != expected:
        raise DataError(
            f"{path}: truncated at byte {os.path.getsize(path)} "
            f"({len(entries)} of {expected} entries)"
        )

    support: dict[str, int] = {}
    glossary_path = index_dir / GLOSSARY_FILE
    if glossary_path.exists():
        for line in glossary_path.read_text(encoding="utf-8").splitlines():
            if not line:
                continue
            stem, _, count = line.rpartition("\t")
            if not stem:
                raise DataError(f"{glossary_path}: malformed line {line!r}")
            support[stem] = int(count)
    glossary = Glossary(
        support=support,
        min_support=manifest["counts"].get("glossary_min_support", 3),
    )
    if len(support) != manifest["counts"]["glossary_terms"]:
        raise DataError(f"{glossary_path}: glossary count mismatch with manifest")
    return entries, glossary
