"""Shared synthetic data builders for training and pipeline tests."""

import numpy as np

from kpgen.datasets import Document, RefType, ReferenceTriplet
from kpgen.textproc import Vocabulary, build_vocabulary, word_tokens

CONTENT_WORDS = [f"topic{i:02d}" for i in range(20)]
FILLER_WORDS = [f"filler{i:02d}" for i in range(30)]


def shared_word_triplets(count: int, seed: int = 13) -> list[ReferenceTriplet]:
    """References share exactly one content word with their positives;
    negatives carry a different content word. Fillers are random."""
    rng = np.random.default_rng(seed)
    triplets = []
    for i in range(count):
        word = CONTENT_WORDS[i % len(CONTENT_WORDS)]
        other = CONTENT_WORDS[(i + 1 + int(rng.integers(len(CONTENT_WORDS) - 1))) % len(CONTENT_WORDS)]
        if other == word:
            other = CONTENT_WORDS[(i + 7) % len(CONTENT_WORDS)]
        ref_fill = rng.choice(FILLER_WORDS, size=2, replace=False)
        pos_fill = rng.choice(FILLER_WORDS, size=4, replace=False)
        neg_fill = rng.choice(FILLER_WORDS, size=4, replace=False)
        reference = " ".join([word, *ref_fill])
        positive = Document(id=f"pos{i}", title="", abstract=" ".join([word, *pos_fill]))
        negative = Document(id=f"neg{i}", title="", abstract=" ".join([other, *neg_fill]))
        triplets.append(ReferenceTriplet(reference, positive, negative, RefType.TITLE))
    return triplets


def triplet_vocabulary(triplets) -> Vocabulary:
    streams = []
    for t in triplets:
        streams.append(word_tokens(t.reference))
        streams.append(word_tokens(t.positive.text))
        streams.append(word_tokens(t.negative.text))
    return build_vocabulary(streams, min_freq=1)
