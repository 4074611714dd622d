"""Redundant-label consensus and corner-case mining."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

from labelcascade.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

CONFLICT_THIRD_LABEL = "third_label"
CONFLICT_DISCARD = "discard_conflicts"

POSITIVE = "positive"
NEGATIVE = "negative"
NEEDS_MORE = "needs_more"
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class LabelEvent:
    item_id: str
    worker_id: str
    answer: bool  # True = yes


@dataclass(frozen=True)
class ConsensusPolicy:
    required_confirmations: int = 2
    conflict_rule: str = CONFLICT_THIRD_LABEL

    def __post_init__(self):
        if self.required_confirmations < 2:
            raise InvalidArgumentError("required_confirmations must be at least 2")
        if self.conflict_rule not in (CONFLICT_THIRD_LABEL, CONFLICT_DISCARD):
            raise InvalidArgumentError(f"unknown conflict rule {self.conflict_rule!r}")


def consensus(events: Sequence[LabelEvent], policy: ConsensusPolicy) -> str:
    """Outcome for one item given its label events.

    A worker's repeated answers collapse to their latest. Unanimous answers
    from enough distinct workers decide; a conflict requests a third label
    (majority then decides) or discards, per policy.
    """
    latest: dict[str, bool] = {}
    for event in events:
        latest[event.worker_id] = event.answer
    votes = list(latest.values())
    yes = sum(votes)
    no = len(votes) - yes
    if len(votes) < policy.required_confirmations:
        return NEEDS_MORE
    if no == 0:
        return POSITIVE
    if yes == 0:
        return NEGATIVE
    if policy.conflict_rule == CONFLICT_DISCARD:
        return UNRESOLVED
    if yes > no and yes >= policy.required_confirmations:
        return POSITIVE
    if no > yes and no >= policy.required_confirmations:
        return NEGATIVE
    return NEEDS_MORE


@dataclass(frozen=True)
class CornerCandidate:
    item_id: str
    yes_votes: int
    no_votes: int

    @property
    def minority(self) -> int:
        return min(self.yes_votes, self.no_votes)


def seed_corner_cases(triple_labels: Mapping[str, Sequence[bool]]) -> list[CornerCandidate]:
    """Items whose three labels disagree, for curation into the tutorial pool.

    Input maps item id to its three labels; items without exactly three are
    skipped with a warning. Output is ranked by disagreement (largest
    minority first), then by id for determinism.
    """
    candidates = []
    for item_id, labels in triple_labels.items():
        if len(labels) != 3:
            logger.warning("item %s has %d labels, expected 3; skipped", item_id, len(labels))
            continue
        yes = sum(bool(v) for v in labels)
        if yes in (0, 3):
            continue
        candidates.append(CornerCandidate(item_id=item_id, yes_votes=yes, no_votes=3 - yes))
    candidates.sort(key=lambda c: (-c.minority, c.item_id))
    return candidates
