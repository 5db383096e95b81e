"""Word-level vocabulary with a reserved out-of-vocabulary id."""

from collections import Counter
from typing import Iterable, Sequence

from kpgen.errors import DataError

OOV_TOKEN = "<oov>"
OOV_ID = 0


class Vocabulary:
    """Bijective term <-> id mapping; id 0 is the reserved OOV slot."""

    def __init__(self, terms: Sequence[str]):
        self._terms = [OOV_TOKEN] + list(terms)
        self._ids = {t: i for i, t in enumerate(self._terms)}
        if len(self._ids) != len(self._terms):
            raise DataError("duplicate terms in vocabulary")

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, term: str) -> bool:
        return term in self._ids and term != OOV_TOKEN

    @property
    def size(self) -> int:
        return len(self._terms)

    def id_of(self, term: str) -> int:
        return self._ids.get(term, OOV_ID)

    def term_of(self, term_id: int) -> str:
        if not 0 <= term_id < len(self._terms):
            raise DataError(f"term id {term_id} out of range [0, {len(self._terms)})")
        return self._terms[term_id]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for term in self._terms:
                fh.write(term + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if not lines or lines[0] != OOV_TOKEN:
            raise DataError(f"{path}: first line must be the reserved token {OOV_TOKEN!r}")
        return cls(lines[1:])


def build_vocabulary(
    token_streams: Iterable[Sequence[str]],
    min_freq: int = 2,
    max_size: int = 50_000,
) -> Vocabulary:
    """Build a vocabulary from corpus token streams.

    Terms below ``min_freq`` total occurrences are dropped; at most
    ``max_size`` terms are kept (most frequent first, ties by term).
    """
    counts: Counter[str] = Counter()
    for tokens in token_streams:
        counts.update(tokens)
    kept = sorted(
        (t for t, c in counts.items() if c >= min_freq and t != OOV_TOKEN),
        key=lambda t: (-counts[t], t),
    )
    return Vocabulary(kept[:max_size])


def to_term_ids(vocab: Vocabulary, tokens: Sequence[str]) -> list[int]:
    """Map tokens to ids, preserving order and multiplicity; unknown
    tokens map to the OOV id."""
    return [vocab.id_of(t) for t in tokens]
