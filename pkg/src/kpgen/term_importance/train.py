"""Mini-batch SGD training of the term-importance model.

Gradients are computed analytically (dense forward/backward through the
max-pooled saturation); the public sparse loss functions in
:mod:`kpgen.term_importance.losses` serve as the independent reference for
what is being optimized.
"""

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from kpgen.errors import ConfigError, DataError, TrainingError
from kpgen.term_importance.losses import LossBreakdown
from kpgen.term_importance.model import MicroImportanceModel
from kpgen.textproc.tokenizer import word_tokens
from kpgen.textproc.vocab import Vocabulary, to_term_ids

EncodedTriplet = tuple[list[int], list[int], list[int]]


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.05
    batch_size: int = 32
    steps: int = 200
    lambda_q: float = 0.05
    lambda_d: float = 0.03
    momentum: float = 0.9
    seed: int = 0
    dim: int = 16
    log_every: int = 10

    def __post_init__(self):
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.batch_size < 1 or self.steps < 0 or self.dim < 1:
            raise ConfigError("batch_size >= 1, steps >= 0 and dim >= 1 required")
        if self.lambda_q < 0 or self.lambda_d < 0:
            raise ConfigError("regularization weights must be nonnegative")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")

    @classmethod
    def from_file(cls, path) -> "TrainConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"{path}: unknown training keys {sorted(unknown)}")
        return cls(**raw)


@dataclass
class StepLog:
    step: int
    loss: LossBreakdown
    doc_nnz_mean: float

    def as_dict(self) -> dict:
        return {"step": self.step, "doc_nnz_mean": self.doc_nnz_mean, **self.loss.as_dict()}


def encode_triplets(triplets: Iterable, vocab: Vocabulary) -> list[EncodedTriplet]:
    """Tokenize (reference, positive, negative) texts into term ids; triplets
    with an empty side are dropped."""
    encoded = []
    for triplet in triplets:
        ref = to_term_ids(vocab, word_tokens(triplet.reference))
        pos = to_term_ids(vocab, word_tokens(triplet.positive.text))
        neg = to_term_ids(vocab, word_tokens(triplet.negative.text))
        if ref and pos and neg:
            encoded.append((ref, pos, neg))
    return encoded


def _forward(model: MicroImportanceModel, ids: Sequence[int]):
    idx = np.asarray(ids, dtype=np.intp)
    raw = model.embedding[idx] @ model.projection
    if model.bias is not None:
        raw = raw + model.bias
    act = np.maximum(raw, 0.0)
    z = np.log1p(act)
    pooled = z.max(axis=0)
    argmax = z.argmax(axis=0)
    return idx, act, pooled, argmax


class _Grads:
    def __init__(self, model: MicroImportanceModel):
        self.embedding = np.zeros_like(model.embedding)
        self.projection = np.zeros_like(model.projection)
        self.bias = None if model.bias is None else np.zeros_like(model.bias)

    def arrays(self) -> list[np.ndarray]:
        out = [self.embedding, self.projection]
        if self.bias is not None:
            out.append(self.bias)
        return out


def _backward_text(model, grads, idx, act, pooled, argmax, d_pooled) -> None:
    cols = np.nonzero((pooled > 0.0) & (d_pooled != 0.0))[0]
    if cols.size == 0:
        return
    rows = argmax[cols]
    d_raw = np.zeros((idx.size, model.vocab_size))
    d_raw[rows, cols] = d_pooled[cols] / (1.0 + act[rows, cols])
    emb_rows = model.embedding[idx]
    np.add.at(grads.embedding, idx, d_raw @ model.projection.T)
    grads.projection += emb_rows.T @ d_raw
    if grads.bias is not None:
        grads.bias += d_raw.sum(axis=0)


def loss_and_grads(
    model: MicroImportanceModel,
    batch: Sequence[EncodedTriplet],
    lambda_q: float,
    lambda_d: float,
) -> tuple[LossBreakdown, _Grads]:
    """Total loss on one batch and its analytic parameter gradients."""
    if not batch:
        raise DataError("empty training batch")
    b = len(batch)
    forwards = [[_forward(model, side) for side in triplet] for triplet in batch]
    q = np.stack([f[0][2] for f in forwards])
    dp = np.stack([f[1][2] for f in forwards])
    dn = np.stack([f[2][2] for f in forwards])

    # softmax cross-entropy of each query against its positive; candidates
    # are all in-batch positives plus the query's own hard negative
    scores = np.hstack([q @ dp.T, (q * dn).sum(axis=1, keepdims=True)])
    shift = scores - scores.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shift).sum(axis=1)) + scores.max(axis=1)
    rank = float((log_z - np.diag(scores)).mean())

    softmax = np.exp(scores - log_z[:, None])
    d_scores = softmax.copy()
    d_scores[np.arange(b), np.arange(b)] -= 1.0
    d_scores /= b
    d_a, d_e = d_scores[:, :b], d_scores[:, b]
    d_q = d_a @ dp + d_e[:, None] * dn
    d_dp = d_a.T @ q
    d_dn = d_e[:, None] * q

    q_mean = q.mean(axis=0)
    query_reg = float((q_mean**2).sum())
    d_q += lambda_q * 2.0 * q_mean / b

    docs_mean = np.vstack([dp, dn]).mean(axis=0)
    doc_reg = float((docs_mean**2).sum())
    d_doc = lambda_d * 2.0 * docs_mean / (2 * b)
    d_dp += d_doc
    d_dn += d_doc

    grads = _Grads(model)
    for i, (fq, fp, fn) in enumerate(forwards):
        _backward_text(model, grads, *fq, d_q[i])
        _backward_text(model, grads, *fp, d_dp[i])
        _backward_text(model, grads, *fn, d_dn[i])

    loss = LossBreakdown(
        rank_loss=rank,
        query_reg=query_reg,
        doc_reg=doc_reg,
        lambda_q=lambda_q,
        lambda_d=lambda_d,
    )
    return loss, grads


def train(
    model: MicroImportanceModel,
    triplets: Sequence[EncodedTriplet],
    config: TrainConfig,
) -> list[StepLog]:
    """Run ``config.steps`` SGD updates in place; returns the training log.

    Deterministic for a fixed seed, triplet order, and configuration. A
    non-finite loss aborts with a diagnostic.
    """
    if config.steps == 0:
        return []
    if not triplets:
        raise DataError("no usable training triplets")
    rng = np.random.default_rng(config.seed)
    velocity = _Grads(model)
    order: list[int] = []
    logs: list[StepLog] = []

    for step in range(config.steps):
        while len(order) < config.batch_size:
            epoch = rng.permutation(len(triplets)).tolist()
            order.extend(epoch)
        batch = [triplets[i] for i in order[: config.batch_size]]
        del order[: config.batch_size]

        loss, grads = loss_and_grads(model, batch, config.lambda_q, config.lambda_d)
        if not np.isfinite(loss.total):
            raise TrainingError(
                f"non-finite loss at step {step}: rank={loss.rank_loss!r} "
                f"query_reg={loss.query_reg!r} doc_reg={loss.doc_reg!r}"
            )
        params = model.arrays()
        for p, v, g in zip(params, velocity.arrays(), grads.arrays()):
            v *= config.momentum
            v -= config.lr * g
            p += v

        if step % config.log_every == 0 or step == config.steps - 1:
            logs.append(StepLog(step=step, loss=loss, doc_nnz_mean=_doc_nnz(model, batch)))
    return logs


def _doc_nnz(model: MicroImportanceModel, batch: Sequence[EncodedTriplet]) -> float:
    counts = []
    for _, pos, neg in batch:
        for side in (pos, neg):
            _, _, pooled, _ = _forward(model, side)
            counts.append(int((pooled > 0.0).sum()))
    return float(np.mean(counts))
