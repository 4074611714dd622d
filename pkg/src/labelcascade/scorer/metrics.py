"""Accuracy metrics used for model comparison.

Two weightings, per the validation protocol: uniform accuracy weighs every
item the same; balanced accuracy weighs the positive and negative classes
equally, which matters because validation sets here are heavily skewed
toward negatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from labelcascade.errors import DegenerateDataError, InvalidArgumentError


@dataclass(frozen=True)
class ModelMetrics:
    uniform_accuracy: float
    balanced_accuracy: float
    removal_count: int


def _check_lengths(scores: Sequence[float], truths: Sequence[bool]) -> None:
    if len(scores) == 0:
        raise InvalidArgumentError("metric input is empty")
    if len(scores) != len(truths):
        raise InvalidArgumentError(f"length mismatch: {len(scores)} scores, {len(truths)} truths")


def uniform_accuracy(scores: Sequence[float], truths: Sequence[bool], cutoff: float = 0.5) -> float:
    """Fraction of items whose thresholded score matches the truth."""
    _check_lengths(scores, truths)
    correct = sum(1 for s, t in zip(scores, truths) if (s >= cutoff) == bool(t))
    return correct / len(scores)


def balanced_accuracy(scores: Sequence[float], truths: Sequence[bool], cutoff: float = 0.5) -> float:
    """Mean of true-positive rate and true-negative rate at the cutoff."""
    _check_lengths(scores, truths)
    positives = sum(1 for t in truths if t)
    negatives = len(truths) - positives
    if positives == 0 or negatives == 0:
        raise DegenerateDataError("balanced accuracy needs both classes in the truths")
    tp = sum(1 for s, t in zip(scores, truths) if t and s >= cutoff)
    tn = sum(1 for s, t in zip(scores, truths) if not t and s < cutoff)
    return 0.5 * (tp / positives + tn / negatives)
