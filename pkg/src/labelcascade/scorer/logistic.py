"""Reference trainable scorer: a regularized logistic linear model.

Loss is mean log-loss plus (l2_lambda / 2) * ||weights||^2 (bias is not
regularized). Training is full-batch gradient descent from zero weights at
a fixed learning rate, so a run is fully determined by its inputs. Any
heavier model can stand in behind the same train/score surface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from labelcascade.errors import DegenerateDataError, InvalidArgumentError

SERIAL_VERSION = 1


@dataclass(frozen=True)
class LabeledExample:
    """One training instance. ``label`` is True for positive."""

    item_id: str
    features: tuple[float, ...]
    label: bool


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 300
    l2_lambda: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise InvalidArgumentError("learning_rate must be positive")
        if self.epochs < 0:
            raise InvalidArgumentError("epochs must be nonnegative")
        if self.l2_lambda < 0:
            raise InvalidArgumentError("l2_lambda must be nonnegative")


@dataclass(frozen=True)
class TrainMeta:
    examples_used: int
    epochs: int
    final_loss: float


@dataclass(frozen=True)
class LogisticModel:
    feature_dim: int
    weights: tuple[float, ...]
    bias: float
    train_meta: TrainMeta

    def score(self, features: Sequence[float]) -> float:
        """Probability-like score in [0, 1]; pure and deterministic."""
        if len(features) != self.feature_dim:
            raise InvalidArgumentError(
                f"expected {self.feature_dim} features, got {len(features)}"
            )
        z = float(np.dot(self.weights, features)) + self.bias
        return _sigmoid_scalar(z)

    def score_batch(self, rows: Sequence[Sequence[float]]) -> list[float]:
        if len(rows) == 0:
            return []
        X = np.asarray(rows, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.feature_dim:
            raise InvalidArgumentError(f"expected rows of dimension {self.feature_dim}")
        z = X @ np.asarray(self.weights) + self.bias
        return [_sigmoid_scalar(v) for v in z]


def _sigmoid_scalar(z: float) -> float:
    # split to avoid overflow in exp for large |z|
    if z >= 0:
        return float(1.0 / (1.0 + np.exp(-z)))
    e = float(np.exp(z))
    return e / (1.0 + e)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _as_matrix(train: Sequence[LabeledExample]) -> tuple[np.ndarray, np.ndarray]:
    if not train:
        raise InvalidArgumentError("training set is empty")
    dim = len(train[0].features)
    if dim == 0:
        raise InvalidArgumentError("feature vectors must be nonempty")
    for example in train:
        if len(example.features) != dim:
            raise InvalidArgumentError(
                f"inconsistent feature dimension: {len(example.features)} != {dim}"
            )
    y = np.array([1.0 if ex.label else 0.0 for ex in train])
    if y.min() == y.max():
        raise DegenerateDataError("training set contains a single class")
    X = np.array([ex.features for ex in train], dtype=np.float64)
    return X, y


def loss_value(
    X: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: float, l2_lambda: float
) -> float:
    """Mean log-loss plus the L2 penalty on weights."""
    z = X @ weights + bias
    p = np.clip(_sigmoid(z), 1e-12, 1.0 - 1e-12)
    data = -np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    return float(data + 0.5 * l2_lambda * np.dot(weights, weights))


def loss_gradient(
    X: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: float, l2_lambda: float
) -> tuple[np.ndarray, float]:
    residual = _sigmoid(X @ weights + bias) - y
    grad_w = X.T @ residual / len(y) + l2_lambda * weights
    grad_b = float(np.mean(residual))
    return grad_w, grad_b


def stable_learning_rate(X: np.ndarray, l2_lambda: float) -> float:
    """Step size below which full-batch descent never increases the loss."""
    max_norm_sq = float(np.max(np.sum(X * X, axis=1)))
    return 1.0 / (4.0 * max_norm_sq + l2_lambda) if max_norm_sq > 0 else 1.0


def train_reference(train: Sequence[LabeledExample], config: TrainConfig) -> LogisticModel:
    """Fit the reference logistic model with full-batch gradient descent.

    Weights start at zero, so zero epochs leaves every score at exactly 0.5.
    Raises DegenerateDataError when only one class is present.
    """
    X, y = _as_matrix(train)
    weights = np.zeros(X.shape[1])
    bias = 0.0
    for _ in range(config.epochs):
        grad_w, grad_b = loss_gradient(X, y, weights, bias, config.l2_lambda)
        weights = weights - config.learning_rate * grad_w
        bias = bias - config.learning_rate * grad_b
    final = loss_value(X, y, weights, bias, config.l2_lambda)
    return LogisticModel(
        feature_dim=X.shape[1],
        weights=tuple(float(w) for w in weights),
        bias=float(bias),
        train_meta=TrainMeta(examples_used=len(train), epochs=config.epochs, final_loss=final),
    )


def score(model, features: Sequence[float]) -> float:
    """Score one feature vector with any model exposing ``score``."""
    return model.score(features)


# -- serialization ------------------------------------------------------------


def save_model(model: LogisticModel, path: str | Path) -> None:
    blob = {
        "version": SERIAL_VERSION,
        "feature_dim": model.feature_dim,
        "weights": list(model.weights),
        "bias": model.bias,
        "train_meta": {
            "examples_used": model.train_meta.examples_used,
            "epochs": model.train_meta.epochs,
            "final_loss": model.train_meta.final_loss,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(blob, fh)


def load_model(path: str | Path) -> LogisticModel:
    with open(path, encoding="utf-8") as fh:
        blob = json.load(fh)
    if blob.get("version") != SERIAL_VERSION:
        raise InvalidArgumentError(f"unsupported model version {blob.get('version')!r}")
    meta = blob["train_meta"]
    return LogisticModel(
        feature_dim=int(blob["feature_dim"]),
        weights=tuple(float(w) for w in blob["weights"]),
        bias=float(blob["bias"]),
        train_meta=TrainMeta(
            examples_used=int(meta["examples_used"]),
            epochs=int(meta["epochs"]),
            final_loss=float(meta["final_loss"]),
        ),
    )
