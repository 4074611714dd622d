"""Confidence thresholds computed on a human-labeled test split.

Two cuts partition scores into auto-positive, ambiguous, and auto-negative
bands. The upper cut is the smallest observed score at which the test items
scoring at or above it are precise enough; the lower cut is the largest
observed score that strictly loses no more than the budgeted share of test
positives below it. Both sweeps only ever place a cut at an observed score,
so items with equal scores always land on the same side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from labelcascade.errors import InvalidArgumentError

ScoredItem = tuple[float, bool]  # (score, truth)


@dataclass(frozen=True)
class ThresholdPair:
    """Upper (auto-positive) and lower (auto-negative) score cuts.

    Either side may be absent. When both are present, lower <= upper; the
    constructor clamps a crossed lower cut up to the upper cut, giving
    auto-positive precedence.
    """

    upper: float | None
    lower: float | None

    def __post_init__(self):
        if self.upper is not None and self.lower is not None and self.lower > self.upper:
            object.__setattr__(self, "lower", self.upper)

    def as_dict(self) -> dict:
        return {"upper": self.upper, "lower": self.lower}


@dataclass(frozen=True)
class Partition:
    auto_positive: frozenset[str]
    auto_negative: frozenset[str]
    ambiguous: frozenset[str]

    def removal_count(self) -> int:
        return len(self.auto_positive) + len(self.auto_negative)


def compute_upper_threshold(
    scored_test: Sequence[ScoredItem], target: float = 0.95
) -> float | None:
    """Smallest observed score t with precision(score >= t) >= target.

    Returns None when no cut meets the target. Minimizing t maximizes the
    auto-positive yield; precision is not monotone in the cut, so the whole
    candidate range is swept.
    """
    if not scored_test:
        raise InvalidArgumentError("scored test set is empty")
    if not 0.0 < target <= 1.0:
        raise InvalidArgumentError(f"precision target must be in (0, 1], got {target}")
    by_score_desc = sorted(scored_test, key=lambda pair: pair[0], reverse=True)
    # exact rational comparison: float division must not decide borderline cuts
    target_exact = Fraction(target)
    best = None
    total = 0
    positives = 0
    index = 0
    n = len(by_score_desc)
    while index < n:
        cut = by_score_desc[index][0]
        # absorb the whole tie group so equal scores are never split
        while index < n and by_score_desc[index][0] == cut:
            total += 1
            positives += by_score_desc[index][1]
            index += 1
        if Fraction(positives, total) >= target_exact:
            best = cut
    return best


def compute_lower_threshold(
    scored_test: Sequence[ScoredItem],
    loss_budget: float = 0.01,
    min_test_positives: int = 10,
) -> float | None:
    """Largest observed score t losing at most floor(loss_budget * P) test
    positives strictly below it.

    Returns None when the test split holds fewer than ``min_test_positives``
    positives; a near-empty positive sample makes the budget meaningless.
    """
    if not scored_test:
        raise InvalidArgumentError("scored test set is empty")
    if not 0.0 <= loss_budget < 1.0:
        raise InvalidArgumentError(f"loss budget must be in [0, 1), got {loss_budget}")
    total_positives = sum(1 for _, truth in scored_test if truth)
    if total_positives < min_test_positives:
        return None
    budget = math.floor(Fraction(loss_budget) * total_positives)
    by_score_asc = sorted(scored_test, key=lambda pair: pair[0])
    best = None
    positives_below = 0
    index = 0
    n = len(by_score_asc)
    while index < n:
        cut = by_score_asc[index][0]
        if positives_below <= budget:
            best = cut
        else:
            break
        while index < n and by_score_asc[index][0] == cut:
            positives_below += by_score_asc[index][1]
            index += 1
    return best


def compute_threshold_pair(
    scored_test: Sequence[ScoredItem],
    precision_target: float = 0.95,
    loss_budget: float = 0.01,
    min_test_positives: int = 10,
) -> ThresholdPair:
    upper = compute_upper_threshold(scored_test, precision_target)
    lower = compute_lower_threshold(scored_test, loss_budget, min_test_positives)
    return ThresholdPair(upper=upper, lower=lower)


def apply_thresholds(scores: Mapping[str, float], pair: ThresholdPair) -> Partition:
    """Partition items by score band.

    auto_positive: score >= upper; auto_negative: score < lower; ambiguous:
    the rest. An absent cut contributes nothing to its band. The three sets
    are disjoint and cover the input exactly.
    """
    if pair.upper is not None and pair.lower is not None and pair.lower > pair.upper:
        raise InvalidArgumentError(f"crossed thresholds: lower {pair.lower} > upper {pair.upper}")
    auto_positive = set()
    auto_negative = set()
    ambiguous = set()
    for item_id, score in scores.items():
        if pair.upper is not None and score >= pair.upper:
            auto_positive.add(item_id)
        elif pair.lower is not None and score < pair.lower:
            auto_negative.add(item_id)
        else:
            ambiguous.add(item_id)
    return Partition(
        auto_positive=frozenset(auto_positive),
        auto_negative=frozenset(auto_negative),
        ambiguous=frozenset(ambiguous),
    )


def band_of(score: float, pair: ThresholdPair) -> str:
    """Band membership for one score: 'positive', 'negative', or 'ambiguous'."""
    if pair.upper is not None and score >= pair.upper:
        return "positive"
    if pair.lower is not None and score < pair.lower:
        return "negative"
    return "ambiguous"


def recount_guarantees(
    scored_test: Iterable[ScoredItem], pair: ThresholdPair, loss_budget: float
) -> dict:
    """Direct recount of the construction guarantees on a scored test split.

    Used by verification harnesses: precision at/above the upper cut and the
    number of positives strictly below the lower cut, measured from scratch.
    """
    items = list(scored_test)
    total_positives = sum(1 for _, truth in items if truth)
    above = [truth for score, truth in items if pair.upper is not None and score >= pair.upper]
    below_pos = sum(
        1 for score, truth in items if pair.lower is not None and score < pair.lower and truth
    )
    return {
        "above_count": len(above),
        "above_precision": (sum(above) / len(above)) if above else None,
        "positives_below": below_pos,
        "positive_loss_budget": math.floor(Fraction(loss_budget) * total_positives),
        "test_positives": total_positives,
    }
