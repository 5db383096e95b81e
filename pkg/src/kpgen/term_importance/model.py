"""Trainable micro-scale term-importance predictor.

Each input token expands to raw scores over the whole vocabulary
(embedding row times projection matrix plus bias); a term's importance is
the max over input positions of log(1 + relu(raw)). The result is sparse
and nonnegative by construction.
"""

import json
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from kpgen.errors import DataError
from kpgen.ioutil import atomic_write_bytes
from kpgen.term_importance.sparse import SparseTermVector

_CHECKPOINT_FORMAT = "kpgen-term-model"
_CHECKPOINT_VERSION = 1


class TermImportancePredictor(Protocol):
    def predict_vector(self, term_ids: Sequence[int], owner: str | None = None) -> SparseTermVector: ...


@dataclass
class MicroImportanceModel:
    embedding: np.ndarray   # (V, d)
    projection: np.ndarray  # (d, V)
    bias: np.ndarray | None  # (V,)

    def __post_init__(self):
        v, d = self.embedding.shape
        if self.projection.shape != (d, v):
            raise DataError(
                f"projection shape {self.projection.shape} does not match embedding {self.embedding.shape}"
            )
        if self.bias is not None and self.bias.shape != (v,):
            raise DataError(f"bias shape {self.bias.shape} does not match vocab size {v}")
        for arr in self.arrays():
            if not np.all(np.isfinite(arr)):
                raise DataError("model parameters must be finite")

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]

    @property
    def dim(self) -> int:
        return self.embedding.shape[1]

    def arrays(self) -> list[np.ndarray]:
        out = [self.embedding, self.projection]
        if self.bias is not None:
            out.append(self.bias)
        return out

    def copy(self) -> "MicroImportanceModel":
        return MicroImportanceModel(
            embedding=self.embedding.copy(),
            projection=self.projection.copy(),
            bias=None if self.bias is None else self.bias.copy(),
        )

    def predict_vector(self, term_ids: Sequence[int], owner: str | None = None) -> SparseTermVector:
        return predict(self, term_ids, owner=owner)


def init_model(
    vocab_size: int,
    dim: int,
    seed: int = 0,
    with_bias: bool = True,
    mirror_projection: bool = True,
) -> MicroImportanceModel:
    """Gaussian-initialized model.

    By default the output projection starts as the transposed embedding, so
    every token initially promotes its own vocabulary slot; contrastive
    training then reshapes both matrices independently. Without this prior
    the ranking loss is free to route relevance through arbitrary slots.
    """
    if dim < 1 or vocab_size < 1:
        raise DataError(f"model needs vocab_size >= 1 and dim >= 1, got {vocab_size}, {dim}")
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(dim)
    embedding = rng.normal(0.0, scale, size=(vocab_size, dim))
    if mirror_projection:
        projection = embedding.T.copy()
    else:
        projection = rng.normal(0.0, scale, size=(dim, vocab_size))
    return MicroImportanceModel(
        embedding=embedding,
        projection=projection,
        bias=np.zeros(vocab_size) if with_bias else None,
    )


def raw_scores(model: MicroImportanceModel, term_ids: Sequence[int]) -> np.ndarray:
    """Per-position raw expansion scores, shape (len(term_ids), V)."""
    ids = np.asarray(term_ids, dtype=np.intp)
    if ids.size == 0:
        raise DataError("empty document")
    if ids.min() < 0 or ids.max() >= model.vocab_size:
        raise DataError(f"term id out of range [0, {model.vocab_size})")
    raw = model.embedding[ids] @ model.projection
    if model.bias is not None:
        raw = raw + model.bias
    return raw


def predict(model: MicroImportanceModel, term_ids: Sequence[int], owner: str | None = None) -> SparseTermVector:
    """Max-pool log(1 + relu(raw)) over input positions; zeros are omitted."""
    raw = raw_scores(model, term_ids)
    pooled = np.log1p(np.maximum(raw, 0.0)).max(axis=0)
    nonzero = np.nonzero(pooled > 0.0)[0]
    weights = {int(j): float(pooled[j]) for j in nonzero}
    return SparseTermVector(weights, owner=owner, validate=False)


def save_model(model: MicroImportanceModel, path) -> None:
    """Single-file checkpoint: JSON header line + little-endian float64 blobs.

    Byte-for-byte deterministic for identical parameters.
    """
    header = {
        "format": _CHECKPOINT_FORMAT,
        "version": _CHECKPOINT_VERSION,
        "vocab_size": model.vocab_size,
        "dim": model.dim,
        "has_bias": model.bias is not None,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8") + b"\n"
    for arr in model.arrays():
        blob += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    atomic_write_bytes(path, blob)


def load_model(path) -> MicroImportanceModel:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        payload = fh.read()
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid checkpoint header: {exc.msg}") from exc
    if header.get("format") != _CHECKPOINT_FORMAT:
        raise DataError(f"{path}: not a term-model checkpoint")
    if header.get("version") != _CHECKPOINT_VERSION:
        raise DataError(f"{path}: unsupported checkpoint version {header.get('version')!r}")
    v, d = int(header["vocab_size"]), int(header["dim"])
    sizes = [v * d, d * v] + ([v] if header["has_bias"] else [])
    expected = 8 * sum(sizes)
    if len(payload) != expected:
        raise DataError(f"{path}: checkpoint truncated at byte {len(header_line) + len(payload)}"
                        f" (expected {len(header_line) + expected} bytes)")
    flat = np.frombuffer(payload, dtype="<f8")
    embedding = flat[: v * d].reshape(v, d).copy()
    projection = flat[v * d : v * d + d * v].reshape(d, v).copy()
    bias = flat[v * d + d * v :].copy() if header["has_bias"] else None
    return MicroImportanceModel(embedding=embedding, projection=projection, bias=bias)
