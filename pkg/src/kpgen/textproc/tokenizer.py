"""Word tokenization producing POS-tagged tokens."""

import re
from dataclasses import dataclass
from typing import Sequence

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    pos: str
    char_offset: int
    word_index: int


def word_tokens(text: str) -> list[str]:
    """Lowercased word tokens; splits on whitespace and punctuation, so
    hyphenated words fall apart into their constituents."""
    return [m.group(0).lower() for m in _WORD_RE.finditer(text)]


def tokenize(text: str, tagger) -> list[TaggedToken]:
    """Tokenize ``text`` and tag every token with the given POS tagger.

    Deterministic: identical input bytes (and tagger) yield identical output.
    Empty input yields an empty list.
    """
    spans = [(m.group(0).lower(), m.start()) for m in _WORD_RE.finditer(text)]
    if not spans:
        return []
    tags = tagger.tag([s for s, _ in spans])
    return [
        TaggedToken(surface=s, pos=tag, char_offset=off, word_index=i)
        for i, ((s, off), tag) in enumerate(zip(spans, tags))
    ]


def tagged_tokens_from_pairs(pairs: Sequence[Sequence[str]]) -> list[TaggedToken]:
    """Build tokens from pre-tagged ``[surface, pos]`` pairs.

    Surfaces are lowercased; char offsets are assigned as if the surfaces
    were joined by single spaces.
    """
    tokens = []
    offset = 0
    for i, (surface, pos) in enumerate(pairs):
        surface = surface.lower()
        tokens.append(TaggedToken(surface=surface, pos=pos, char_offset=offset, word_index=i))
        offset += len(surface) + 1
    return tokens
