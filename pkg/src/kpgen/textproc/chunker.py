"""Noun-phrase candidate extraction over POS tag sequences.

The chunk grammar uses the familiar angle-bracket syntax where ``<NN.*>``
matches one token whose tag matches the inner pattern. Matching is
left-to-right, longest-match, non-overlapping.
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from kpgen.textproc.stem import stem_phrase
from kpgen.textproc.tokenizer import TaggedToken

# adjective/noun runs ending in a noun or cardinal, or a lone noun
DEFAULT_GRAMMAR = "(<NN.*|JJ.*>+<NN.*|CD>)|<NN.*>"


class PhraseSource(str, Enum):
    GIVEN_DOC = "given_doc"
    NEIGHBOR = "neighbor"


@dataclass(frozen=True)
class CandidatePhrase:
    """A candidate keyphrase: token sequence plus where it was found.

    ``first_position`` is the word index of the phrase's first occurrence in
    the document under consideration, or None when the phrase is absent from
    it. Stemmed-form equality (``stem``) is the canonical identity used for
    deduplication everywhere.
    """

    tokens: tuple[str, ...]
    first_position: int | None
    source: PhraseSource
    term_ids: tuple[int, ...] | None = None
    stem: str = field(init=False)

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("candidate phrase needs at least one token")
        object.__setattr__(self, "stem", stem_phrase(self.tokens))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def compile_tag_grammar(grammar: str) -> re.Pattern:
    """Compile an angle-bracket chunk grammar into a regex over ``<TAG>``
    encoded tag strings. Inside brackets ``.`` matches any tag character."""
    parts = []
    for piece in re.split(r"(<[^<>]*>)", grammar):
        if piece.startswith("<") and piece.endswith(">"):
            inner = piece[1:-1].replace(".", "[^<>]")
            parts.append(f"(?:<(?:{inner})>)")
        else:
            parts.append(piece.replace(" ", ""))
    return re.compile("".join(parts))


_DEFAULT_PATTERN = compile_tag_grammar(DEFAULT_GRAMMAR)


def chunk_noun_phrases(
    tokens: Sequence[TaggedToken],
    grammar: re.Pattern | None = None,
) -> list[CandidatePhrase]:
    """Extract maximal non-overlapping grammar matches as candidate phrases.

    Duplicates (by stemmed form) are collapsed keeping the earliest
    occurrence's position.
    """
    pattern = grammar if grammar is not None else _DEFAULT_PATTERN
    encoded: list[str] = []
    bounds: list[int] = [0]
    for tok in tokens:
        encoded.append(f"<{tok.pos}>")
        bounds.append(bounds[-1] + len(encoded[-1]))
    tag_string = "".join(encoded)
    token_at = {offset: i for i, offset in enumerate(bounds)}

    seen: dict[str, CandidatePhrase] = {}
    out: list[CandidatePhrase] = []
    for match in pattern.finditer(tag_string):
        span = tokens[token_at[match.start()] : token_at[match.end()]]
        phrase = CandidatePhrase(
            tokens=tuple(t.surface for t in span),
            first_position=span[0].word_index,
            source=PhraseSource.GIVEN_DOC,
        )
        if phrase.stem not in seen:
            seen[phrase.stem] = phrase
            out.append(phrase)
    return out
