"""Sparse term-importance prediction: model, losses, training, persistence."""

from kpgen.term_importance.losses import LossBreakdown, flops_reg, rank_loss_ibn
from kpgen.term_importance.model import (
    MicroImportanceModel,
    TermImportancePredictor,
    init_model,
    load_model,
    predict,
    raw_scores,
    save_model,
)
from kpgen.term_importance.sparse import (
    SparseTermVector,
    load_vectors,
    save_vectors,
    vector_from_pairs,
)
from kpgen.term_importance.train import (
    StepLog,
    TrainConfig,
    encode_triplets,
    loss_and_grads,
    train,
)

__all__ = [
    "LossBreakdown",
    "MicroImportanceModel",
    "SparseTermVector",
    "StepLog",
    "TermImportancePredictor",
    "TrainConfig",
    "encode_triplets",
    "flops_reg",
    "init_model",
    "load_model",
    "load_vectors",
    "loss_and_grads",
    "predict",
    "rank_loss_ibn",
    "raw_scores",
    "save_model",
    "save_vectors",
    "train",
    "vector_from_pairs",
]
