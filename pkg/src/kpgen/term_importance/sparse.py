"""Sparse nonnegative term-weight vectors and their file format."""

import math
from typing import Iterable, Iterator, Mapping

from kpgen.errors import DataError
from kpgen.ioutil import atomic_write_jsonl, iter_jsonl


class SparseTermVector:
    """Mapping term-id -> strictly positive weight; absent ids weigh 0."""

    __slots__ = ("_weights", "owner")

    def __init__(self, weights: Mapping[int, float], owner: str | None = None, validate: bool = True):
        if validate:
            checked = {}
            for term_id, weight in weights.items():
                if not isinstance(term_id, int) or term_id < 0:
                    raise DataError(f"bad term id {term_id!r}")
                weight = float(weight)
                if not math.isfinite(weight) or weight <= 0.0:
                    raise DataError(f"term {term_id} has non-positive weight {weight!r}")
                checked[term_id] = weight
            self._weights = checked
        else:
            self._weights = dict(weights)
        self.owner = owner

    def get(self, term_id: int) -> float:
        return self._weights.get(term_id, 0.0)

    def items(self) -> list[tuple[int, float]]:
        """(term_id, weight) pairs in ascending id order."""
        return sorted(self._weights.items())

    def ids(self) -> set[int]:
        return set(self._weights)

    def __len__(self) -> int:
        return len(self._weights)

    def __bool__(self) -> bool:
        return bool(self._weights)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTermVector):
            return NotImplemented
        return self._weights == other._weights and self.owner == other.owner

    def __repr__(self) -> str:
        return f"SparseTermVector(nnz={len(self._weights)}, owner={self.owner!r})"

    def dot(self, other: "SparseTermVector") -> float:
        """Dot product over the intersection of nonzero ids (ascending order,
        so results are deterministic)."""
        a, b = self._weights, other._weights
        if len(b) < len(a):
            a, b = b, a
        return sum(a[i] * b[i] for i in sorted(a.keys() & b.keys()))


def save_vectors(vectors: Mapping[str, SparseTermVector], path) -> None:
    """Write ``{"id", "v": [[term_id, weight], ...]}`` JSON lines, ids sorted.

    Weights round-trip at full precision (shortest-repr JSON floats).
    """
    def records() -> Iterator[dict]:
        for doc_id, vec in vectors.items():
            yield {"id": doc_id, "v": [[t, w] for t, w in vec.items()]}

    atomic_write_jsonl(path, records())


def load_vectors(path) -> dict[str, SparseTermVector]:
    """Inverse of :func:`save_vectors`; malformed records raise DataError
    naming the record."""
    out: dict[str, SparseTermVector] = {}
    for lineno, _, record in iter_jsonl(path):
        where = f"{path}:{lineno}"
        if not isinstance(record, dict) or "id" not in record or "v" not in record:
            raise DataError(f"{where}: vector record must have 'id' and 'v'")
        doc_id = record["id"]
        if doc_id in out:
            raise DataError(f"{where}: duplicate vector id {doc_id!r}")
        weights: dict[int, float] = {}
        previous = -1
        for pair in record["v"]:
            if not isinstance(pair, list) or len(pair) != 2:
                raise DataError(f"{where} (id {doc_id!r}): malformed [term_id, weight] pair")
            term_id, weight = pair
            if not isinstance(term_id, int) or term_id <= previous:
                raise DataError(f"{where} (id {doc_id!r}): term ids must be sorted and unique")
            previous = term_id
            weights[term_id] = weight
        try:
            out[doc_id] = SparseTermVector(weights, owner=doc_id)
        except DataError as exc:
            raise DataError(f"{where} (id {doc_id!r}): {exc}") from exc
    return out


def vector_from_pairs(pairs: Iterable[Iterable], owner: str | None = None) -> SparseTermVector:
    """Build a vector from (term_id, weight) pairs, e.g. parsed JSON."""
    weights = {}
    for term_id, weight in pairs:
        if term_id in weights:
            raise DataError(f"duplicate term id {term_id} in vector")
        weights[int(term_id)] = float(weight)
    return SparseTermVector(weights, owner=owner)
