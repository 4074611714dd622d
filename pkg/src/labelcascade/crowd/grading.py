"""Submission grading against the embedded gold checks.

Pass bars are exact counts derived from the 90% online and 85% hidden
accuracy requirements on 20-item check sets: 18 and 17 correct answers.
Grading is pure; the service layer owns duplicates, reputation, and state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from labelcascade.crowd.consensus import LabelEvent
from labelcascade.crowd.hits import (
    HIDDEN_COUNT,
    HIT_TOTAL,
    KIND_HIDDEN,
    KIND_ONLINE,
    KIND_TARGET,
    ONLINE_COUNT,
    HitSpec,
)
from labelcascade.errors import InvalidArgumentError

ONLINE_PASS_RATE = Fraction(90, 100)
HIDDEN_PASS_RATE = Fraction(85, 100)
ONLINE_PASS_MIN = math.ceil(ONLINE_PASS_RATE * ONLINE_COUNT)  # 18 of 20
HIDDEN_PASS_MIN = math.ceil(HIDDEN_PASS_RATE * HIDDEN_COUNT)  # 17 of 20

VERDICT_ACCEPTED = "accepted"
VERDICT_REJECTED_ONLINE = "rejected_online"
VERDICT_REJECTED_HIDDEN = "rejected_hidden"


@dataclass(frozen=True)
class HitAssignment:
    """One worker's answers for one HIT, in slot order; True means yes."""

    hit_id: str
    worker_id: str
    answers: tuple[bool, ...]
    submitted_at: int = 0

    def __post_init__(self):
        if len(self.answers) != HIT_TOTAL:
            raise InvalidArgumentError(
                f"assignment must carry {HIT_TOTAL} answers, got {len(self.answers)}"
            )


@dataclass(frozen=True)
class GradeResult:
    passed: bool
    correct: int
    total: int
    detail: tuple[tuple[str, bool], ...]  # (item_id, answered correctly)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


def _grade(assignment: HitAssignment, spec: HitSpec, kind: str, pass_min: int) -> GradeResult:
    if assignment.hit_id != spec.hit_id:
        raise InvalidArgumentError(
            f"assignment for {assignment.hit_id} graded against spec {spec.hit_id}"
        )
    detail = []
    correct = 0
    for slot in spec.slots:
        if slot.kind != kind:
            continue
        answer = assignment.answers[slot.position - 1]
        ok = answer == slot.truth
        correct += ok
        detail.append((slot.item_id, ok))
    return GradeResult(passed=correct >= pass_min, correct=correct, total=len(detail),
                       detail=tuple(detail))


def grade_online(assignment: HitAssignment, spec: HitSpec) -> GradeResult:
    """Pass requires at least 18 of the 20 online-gold answers correct."""
    return _grade(assignment, spec, KIND_ONLINE, ONLINE_PASS_MIN)


def grade_hidden(assignment: HitAssignment, spec: HitSpec) -> GradeResult:
    """Server-side check: at least 17 of the 20 hidden-gold answers correct."""
    return _grade(assignment, spec, KIND_HIDDEN, HIDDEN_PASS_MIN)


@dataclass(frozen=True)
class SubmissionOutcome:
    verdict: str
    online: GradeResult
    hidden: GradeResult | None
    label_events: tuple[LabelEvent, ...]

    @property
    def accepted(self) -> bool:
        return self.verdict == VERDICT_ACCEPTED

    @property
    def resubmit_allowed(self) -> bool:
        return self.verdict == VERDICT_REJECTED_ONLINE


def record_submission(assignment: HitAssignment, spec: HitSpec) -> SubmissionOutcome:
    """Grade one submission and, if it clears both checks, emit target labels.

    An online failure rejects with resubmission allowed and skips the hidden
    check entirely (nothing was submitted for real). A hidden failure
    rejects for good; the caller applies the reputation hit. Only target
    slots ever produce label events; gold answers never reach the label
    store.
    """
    online = grade_online(assignment, spec)
    if not online.passed:
        return SubmissionOutcome(
            verdict=VERDICT_REJECTED_ONLINE, online=online, hidden=None, label_events=()
        )
    hidden = grade_hidden(assignment, spec)
    if not hidden.passed:
        return SubmissionOutcome(
            verdict=VERDICT_REJECTED_HIDDEN, online=online, hidden=hidden, label_events=()
        )
    events = tuple(
        LabelEvent(
            item_id=slot.item_id,
            worker_id=assignment.worker_id,
            answer=assignment.answers[slot.position - 1],
        )
        for slot in spec.slots
        if slot.kind == KIND_TARGET
    )
    return SubmissionOutcome(
        verdict=VERDICT_ACCEPTED, online=online, hidden=hidden, label_events=events
    )
