"""Run-level quality metrics: effort amplification and precision audits."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from statistics import NormalDist
from typing import Collection, Mapping

from labelcascade.errors import InvalidArgumentError, UndefinedRatioError

Z_95 = NormalDist().inv_cdf(0.975)


@dataclass(frozen=True)
class AmplificationReport:
    """How far the cascade stretched the human labels it consumed."""

    total_resolved: int
    human_labeled_items: int
    ratio: float

    def as_dict(self) -> dict:
        return {
            "total_resolved": self.total_resolved,
            "human_labeled_items": self.human_labeled_items,
            "ratio": self.ratio,
        }


@dataclass(frozen=True)
class PrecisionAudit:
    sample_size: int
    confirmed_positive: int
    precision: float
    wilson_low: float
    wilson_high: float

    def as_dict(self) -> dict:
        return {
            "sample_size": self.sample_size,
            "confirmed_positive": self.confirmed_positive,
            "precision": self.precision,
            "wilson_low": self.wilson_low,
            "wilson_high": self.wilson_high,
        }


def amplification_ratio(total_resolved: int, human_labeled_items: int) -> AmplificationReport:
    """Resolved items (auto plus human) per distinct human-labeled target item.

    Gold and tutorial slots never count in the denominator; callers pass the
    count of distinct pool items that received at least one human label.
    """
    if human_labeled_items <= 0:
        raise UndefinedRatioError("no human-labeled items; amplification undefined")
    return AmplificationReport(
        total_resolved=total_resolved,
        human_labeled_items=human_labeled_items,
        ratio=total_resolved / human_labeled_items,
    )


def wilson_interval(successes: int, total: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        raise InvalidArgumentError("total must be positive")
    if not 0 <= successes <= total:
        raise InvalidArgumentError("successes must lie in [0, total]")
    p = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def precision_audit(
    positive_set: Collection[str],
    sample_n: int,
    expert_labels: Mapping[str, bool],
    seed: int = 0,
) -> PrecisionAudit:
    """Estimate positive-set precision from an expert-relabeled sample.

    Samples ``sample_n`` items uniformly from the positive set and reports
    the confirmed fraction with a 95% Wilson interval. Every sampled item
    must carry an expert label.
    """
    if sample_n <= 0:
        raise InvalidArgumentError("audit sample must be nonempty")
    ids = sorted(positive_set)
    if sample_n > len(ids):
        raise InvalidArgumentError(
            f"audit sample of {sample_n} exceeds positive set of {len(ids)}"
        )
    sample = random.Random(seed).sample(ids, sample_n)
    missing = [item_id for item_id in sample if item_id not in expert_labels]
    if missing:
        raise InvalidArgumentError(
            f"expert labels missing for {len(missing)} sampled items (first: {missing[0]})"
        )
    confirmed = sum(1 for item_id in sample if expert_labels[item_id])
    low, high = wilson_interval(confirmed, sample_n)
    return PrecisionAudit(
        sample_size=sample_n,
        confirmed_positive=confirmed,
        precision=confirmed / sample_n,
        wilson_low=low,
        wilson_high=high,
    )
