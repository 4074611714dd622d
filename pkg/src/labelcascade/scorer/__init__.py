"""Pluggable classifier contract, reference trainable scorer, model selection."""

from labelcascade.scorer.logistic import (
    LabeledExample,
    LogisticModel,
    TrainConfig,
    TrainMeta,
    load_model,
    save_model,
    score,
    train_reference,
)
from labelcascade.scorer.metrics import ModelMetrics, balanced_accuracy, uniform_accuracy
from labelcascade.scorer.selection import select_model

__all__ = [
    "LabeledExample",
    "LogisticModel",
    "ModelMetrics",
    "TrainConfig",
    "TrainMeta",
    "balanced_accuracy",
    "load_model",
    "save_model",
    "score",
    "select_model",
    "train_reference",
    "uniform_accuracy",
]
