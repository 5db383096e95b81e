"""Training objective: contrastive ranking loss plus sparsity penalties."""

import math
from dataclasses import dataclass
from typing import Sequence

from kpgen.errors import DataError
from kpgen.term_importance.sparse import SparseTermVector


@dataclass(frozen=True)
class LossBreakdown:
    rank_loss: float
    query_reg: float
    doc_reg: float
    lambda_q: float
    lambda_d: float

    @property
    def total(self) -> float:
        return self.rank_loss + self.lambda_q * self.query_reg + self.lambda_d * self.doc_reg

    def as_dict(self) -> dict:
        return {
            "rank_loss": self.rank_loss,
            "query_reg": self.query_reg,
            "doc_reg": self.doc_reg,
            "lambda_q": self.lambda_q,
            "lambda_d": self.lambda_d,
            "total": self.total,
        }


def _logsumexp(values: Sequence[float]) -> float:
    m = max(values)
    return m + math.log(sum(math.exp(v - m) for v in values))


def rank_loss_ibn(
    queries: Sequence[SparseTermVector],
    positives: Sequence[SparseTermVector],
    negatives: Sequence[SparseTermVector],
) -> float:
    """Mean softmax cross-entropy of each query against its positive.

    The candidate set for query i is its own positive and hard negative plus
    every other item's positive (in-batch negatives); relevance is the
    sparse dot product.
    """
    if not (len(queries) == len(positives) == len(negatives)):
        raise DataError("rank loss needs equally sized batches")
    if not queries:
        raise DataError("rank loss needs a nonempty batch")
    b = len(queries)
    total = 0.0
    for i in range(b):
        scores = [queries[i].dot(positives[k]) for k in range(b)]
        scores.append(queries[i].dot(negatives[i]))
        total += _logsumexp(scores) - scores[i]
    return total / b


def flops_reg(batch: Sequence[SparseTermVector], vocab_size: int) -> float:
    """Sum over terms of the squared mean activation across the batch."""
    if not batch:
        raise DataError("flops regularizer needs a nonempty batch")
    b = len(batch)
    sums: dict[int, float] = {}
    for vec in batch:
        for term_id, weight in vec.items():
            if term_id >= vocab_size:
                raise DataError(f"term id {term_id} outside vocabulary of size {vocab_size}")
            sums[term_id] = sums.get(term_id, 0.0) + weight
    return sum((sums[j] / b) ** 2 for j in sorted(sums))
