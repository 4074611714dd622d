"""Dual-accuracy model selection.

The winning candidate is the one that removes the most test items from the
ambiguous band under its own thresholds. Both accuracy weightings are
measured on the validation split; they only break removal ties (balanced
first, then uniform, then candidate order).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from labelcascade.cascade.thresholds import ThresholdPair, band_of, compute_threshold_pair
from labelcascade.errors import InvalidArgumentError
from labelcascade.scorer.logistic import LabeledExample
from labelcascade.scorer.metrics import ModelMetrics, balanced_accuracy, uniform_accuracy


class ScoringModel(Protocol):
    """Anything the cascade can score with: trained reference models,
    plugged-in networks, or simulation oracles."""

    def score(self, features: Sequence[float]) -> float: ...

    def score_batch(self, rows: Sequence[Sequence[float]]) -> list[float]: ...


@dataclass(frozen=True)
class SelectionResult:
    model: ScoringModel
    metrics: ModelMetrics
    thresholds: ThresholdPair
    scored_test: tuple[tuple[float, bool], ...]
    candidate_index: int


def _scored(model: ScoringModel, examples: Sequence[LabeledExample]) -> list[tuple[float, bool]]:
    scores = model.score_batch([ex.features for ex in examples])
    return list(zip(scores, (ex.label for ex in examples)))


def select_model(
    candidates: Sequence[ScoringModel],
    val: Sequence[LabeledExample],
    test: Sequence[LabeledExample],
    precision_target: float = 0.95,
    loss_budget: float = 0.01,
    min_test_positives: int = 10,
) -> SelectionResult:
    """Pick the candidate that removes the most test items.

    Requires at least one candidate and nonempty val/test splits with both
    classes present (metric errors propagate otherwise).
    """
    if not candidates:
        raise InvalidArgumentError("no candidate models")
    if not val or not test:
        raise InvalidArgumentError("validation and test splits must be nonempty")

    best: tuple | None = None
    result: SelectionResult | None = None
    for index, model in enumerate(candidates):
        scored_test = _scored(model, test)
        pair = compute_threshold_pair(scored_test, precision_target, loss_budget, min_test_positives)
        removal = sum(1 for score, _ in scored_test if band_of(score, pair) != "ambiguous")
        val_scores = [model.score(ex.features) for ex in val]
        val_truths = [ex.label for ex in val]
        balanced = balanced_accuracy(val_scores, val_truths)
        uniform = uniform_accuracy(val_scores, val_truths)
        # larger is better on the first three keys, earlier index wins ties
        key = (removal, balanced, uniform, -index)
        if best is None or key > best:
            best = key
            result = SelectionResult(
                model=model,
                metrics=ModelMetrics(
                    uniform_accuracy=uniform,
                    balanced_accuracy=balanced,
                    removal_count=removal,
                ),
                thresholds=pair,
                scored_test=tuple(scored_test),
                candidate_index=index,
            )
    assert result is not None
    return result
