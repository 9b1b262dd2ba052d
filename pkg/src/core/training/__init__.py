"""Training loop, optimisation, negative sampling, and evaluation."""

from src.core.training.evaluation import (
    LinkPredictor,
    evaluate,
    filtered_rank,
    random_mrr,
    rank_query,
)
from src.core.training.optim import Adam, AdamState, adam_step
from src.core.training.sampling import negative_sample
from src.core.training.trainer import NativeTrainer, TrainResult, train

__all__ = [
    "Adam",
    "AdamState",
    "LinkPredictor",
    "NativeTrainer",
    "TrainResult",
    "adam_step",
    "evaluate",
    "filtered_rank",
    "negative_sample",
    "random_mrr",
    "rank_query",
    "train",
]
