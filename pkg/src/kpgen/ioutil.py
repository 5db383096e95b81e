"""JSON-lines I/O, atomic file writes, and config hashing."""

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Iterable, Iterator

from kpgen.errors import DataError


def iter_jsonl(path) -> Iterator[tuple[int, int, Any]]:
    """Yield ``(line_number, byte_offset, record)`` for each non-empty line.

    Malformed lines (including a truncated final line) raise DataError naming
    the line number and byte offset.
    """
    path = Path(path)
    offset = 0
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if line:
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(
                        f"{path}: malformed JSON on line {lineno} (byte {offset}): {exc.msg}"
                    ) from exc
                yield lineno, offset, record
            offset += len(raw)


def read_jsonl(path) -> list[Any]:
    return [record for _, _, record in iter_jsonl(path)]


def jsonl_line(obj: Any) -> str:
    """One deterministic JSON line (keys emitted in insertion order)."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def atomic_write_jsonl(path, records: Iterable[Any]) -> int:
    """Atomically write records as JSON lines; returns the record count."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    count = 0
    with open(tmp, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(jsonl_line(record))
            count += 1
    os.replace(tmp, path)
    return count


def atomic_write_bytes(path, payload: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def config_hash(obj: Any) -> str:
    """Stable sha256 over a JSON-serializable configuration object."""
    canonical = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
