"""Tokenization, POS tagging, noun-phrase chunking, stemming, vocabulary."""

from kpgen.textproc.chunker import (
    DEFAULT_GRAMMAR,
    CandidatePhrase,
    PhraseSource,
    chunk_noun_phrases,
    compile_tag_grammar,
)
from kpgen.textproc.stem import stem, stem_phrase
from kpgen.textproc.tagging import PerceptronTagger, PosTagger
from kpgen.textproc.tokenizer import (
    TaggedToken,
    tagged_tokens_from_pairs,
    tokenize,
    word_tokens,
)
from kpgen.textproc.vocab import (
    OOV_ID,
    OOV_TOKEN,
    Vocabulary,
    build_vocabulary,
    to_term_ids,
)

__all__ = [
    "DEFAULT_GRAMMAR",
    "CandidatePhrase",
    "OOV_ID",
    "OOV_TOKEN",
    "PerceptronTagger",
    "PhraseSource",
    "PosTagger",
    "TaggedToken",
    "Vocabulary",
    "build_vocabulary",
    "chunk_noun_phrases",
    "compile_tag_grammar",
    "stem",
    "stem_phrase",
    "tagged_tokens_from_pairs",
    "to_term_ids",
    "tokenize",
    "word_tokens",
]
