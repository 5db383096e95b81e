import json
from pathlib import Path

import pytest

from kpgen.textproc import PerceptronTagger

FIXTURES = Path(__file__).parent / "fixtures"


def load_tagged_sentences() -> list[list[tuple[str, str]]]:
    sentences = []
    with open(FIXTURES / "tagged_sentences.jsonl", "r", encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            sentences.append([(w, t) for w, t in record["tokens"]])
    return sentences


@pytest.fixture(scope="session")
def tagged_sentences():
    return load_tagged_sentences()


@pytest.fixture(scope="session")
def trained_tagger(tagged_sentences):
    tagger = PerceptronTagger()
    tagger.train(tagged_sentences, n_iter=8, seed=7)
    return tagger
