"""Pluggable POS tagging.

Two built-ins: a small averaged-perceptron tagger that can be trained on any
PTB-style tagged fixture, and pass-through tagging for pre-tagged corpora
(see :func:`kpgen.textproc.tokenizer.tagged_tokens_from_pairs`), which keeps
tests independent of any particular tagger's output.
"""

import json
import random
from collections import defaultdict
from typing import Protocol, Sequence

from kpgen.errors import DataError

_START = ["-START-", "-START2-"]
_END = ["-END-", "-END2-"]


class PosTagger(Protocol):
    def tag(self, words: Sequence[str]) -> list[str]: ...


class PerceptronTagger:
    """Greedy left-to-right averaged perceptron tagger."""

    def __init__(self):
        self.weights: dict[str, dict[str, float]] = {}
        self.classes: list[str] = []
        self.tagdict: dict[str, str] = {}
        self._totals: dict[tuple[str, str], float] = defaultdict(float)
        self._tstamps: dict[tuple[str, str], int] = defaultdict(int)
        self._updates = 0

    @staticmethod
    def _normalize(word: str) -> str:
        if word.isdigit():
            return "!DIGIT"
        return word.lower()

    @staticmethod
    def _features(i: int, word: str, context: list[str], prev: str, prev2: str):
        feats = {
            "bias": 1,
            "suf3 " + word[-3:]: 1,
            "pre1 " + word[0]: 1,
            "tag-1 " + prev: 1,
            "tag-2 " + prev2: 1,
            "tag-1-2 " + prev + " " + prev2: 1,
            "word " + context[i]: 1,
            "tag-1+word " + prev + " " + context[i]: 1,
            "word-1 " + context[i - 1]: 1,
            "suf3-1 " + context[i - 1][-3:]: 1,
            "word+1 " + context[i + 1]: 1,
            "suf3+1 " + context[i + 1][-3:]: 1,
        }
        return feats

    def _predict(self, feats) -> str:
        scores: dict[str, float] = defaultdict(float)
        for feat in feats:
            weights = self.weights.get(feat)
            if not weights:
                continue
            for tag, w in weights.items():
                scores[tag] += w
        # ties broken by tag name for determinism
        return max(self.classes, key=lambda t: (scores[t], t))

    def _update(self, truth: str, guess: str, feats) -> None:
        self._updates += 1
        if truth == guess:
            return
        for feat in feats:
            weights = self.weights.setdefault(feat, {})
            for tag, delta in ((truth, 1.0), (guess, -1.0)):
                key = (feat, tag)
                self._totals[key] += (self._updates - self._tstamps[key]) * weights.get(tag, 0.0)
                self._tstamps[key] = self._updates
                weights[tag] = weights.get(tag, 0.0) + delta

    def _average(self) -> None:
        for feat, weights in self.weights.items():
            for tag, w in list(weights.items()):
                key = (feat, tag)
                total = self._totals[key] + (self._updates - self._tstamps[key]) * w
                averaged = total / self._updates if self._updates else w
                if averaged:
                    weights[tag] = round(averaged, 6)
                else:
                    del weights[tag]

    def train(self, sentences: Sequence[Sequence[tuple[str, str]]], n_iter: int = 5, seed: int = 0) -> None:
        """Train on sentences of ``(word, tag)`` pairs."""
        tag_counts: dict[str, set[str]] = defaultdict(set)
        classes = set()
        for sentence in sentences:
            for word, tag in sentence:
                classes.add(tag)
                tag_counts[self._normalize(word)].add(tag)
        self.classes = sorted(classes)
        self.tagdict = {w: tags.pop() for w, tags in tag_counts.items() if len(tags) == 1}

        rng = random.Random(seed)
        data = [list(s) for s in sentences]
        for _ in range(n_iter):
            rng.shuffle(data)
            for sentence in data:
                context = _START + [self._normalize(w) for w, _ in sentence] + _END
                prev, prev2 = _START[0], _START[1]
                for i, (word, truth) in enumerate(sentence):
                    norm = self._normalize(word)
                    guess = self.tagdict.get(norm)
                    if guess is None:
                        feats = self._features(i + 2, norm, context, prev, prev2)
                        guess = self._predict(feats)
                        self._update(truth, guess, feats)
                    prev2, prev = prev, guess
        self._average()

    def tag(self, words: Sequence[str]) -> list[str]:
        if not self.classes:
            raise DataError("tagger has no trained weights")
        context = _START + [self._normalize(w) for w in words] + _END
        tags = []
        prev, prev2 = _START[0], _START[1]
        for i, word in enumerate(words):
            norm = self._normalize(word)
            tag = self.tagdict.get(norm)
            if tag is None:
                tag = self._predict(self._features(i + 2, norm, context, prev, prev2))
            tags.append(tag)
            prev2, prev = prev, tag
        return tags

    def save(self, path) -> None:
        payload = {
            "format": "kpgen-perceptron-tagger",
            "version": 1,
            "classes": self.classes,
            "tagdict": self.tagdict,
            "weights": self.weights,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)

    @classmethod
    def load(cls, path) -> "PerceptronTagger":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != "kpgen-perceptron-tagger" or payload.get("version") != 1:
            raise DataError(f"{path}: not a version-1 tagger file")
        tagger = cls()
        tagger.classes = list(payload["classes"])
        tagger.tagdict = dict(payload["tagdict"])
        tagger.weights = {f: dict(w) for f, w in payload["weights"].items()}
        return tagger
