from __future__ import annotations

import random

import pytest

from labelcascade.crowd.grading import (
    HIDDEN_PASS_MIN,
    ONLINE_PASS_MIN,
    HitAssignment,
    grade_hidden,
    grade_online,
    record_submission,
)
from labelcascade.crowd.hits import KIND_HIDDEN, KIND_ONLINE, KIND_TARGET
from labelcascade.errors import InvalidArgumentError

from helpers import make_gold
from test_gold_hits import TARGETS, build_hit


def answers_with_check_errors(spec, kind, wrong: int, default=True):
    """All answers correct except ``wrong`` deliberate mistakes on ``kind``."""
    answers = []
    flipped = 0
    for slot in spec.slots:
        if slot.truth is not None:
            value = slot.truth
        else:
            value = default
        if slot.kind == kind and flipped < wrong:
            value = not value
            flipped += 1
        answers.append(value)
    assert flipped == wrong
    return tuple(answers)


def test_pass_bars_derive_from_the_stated_rates():
    assert ONLINE_PASS_MIN == 18  # ceil(0.90 * 20)
    assert HIDDEN_PASS_MIN == 17  # ceil(0.85 * 20)


@pytest.mark.parametrize("correct", range(0, 21))
def test_online_boundary_exact_for_every_count(correct):
    spec = build_hit(seed=10)
    assignment = HitAssignment(
        "hit-1", "w-1", answers_with_check_errors(spec, KIND_ONLINE, wrong=20 - correct)
    )
    result = grade_online(assignment, spec)
    assert result.correct == correct
    assert result.total == 20
    assert result.passed == (correct >= 18)


@pytest.mark.parametrize("correct", range(0, 21))
def test_hidden_boundary_exact_for_every_count(correct):
    spec = build_hit(seed=11)
    assignment = HitAssignment(
        "hit-1", "w-1", answers_with_check_errors(spec, KIND_HIDDEN, wrong=20 - correct)
    )
    result = grade_hidden(assignment, spec)
    assert result.correct == correct
    assert result.passed == (correct >= 17)


def test_randomized_vectors_match_count_oracle():
    rng = random.Random(17)
    spec = build_hit(seed=12)
    for _ in range(60):
        answers = tuple(rng.random() < 0.5 for _ in range(205))
        assignment = HitAssignment("hit-1", "w-1", answers)
        for kind, grader, bar in (
            (KIND_ONLINE, grade_online, 18),
            (KIND_HIDDEN, grade_hidden, 17),
        ):
            expected = sum(
                1
                for slot in spec.slots
                if slot.kind == kind and answers[slot.position - 1] == slot.truth
            )
            result = grader(assignment, spec)
            assert result.correct == expected
            assert result.passed == (expected >= bar)


def test_all_no_spammer_fails_hidden_on_balanced_pool():
    # hidden pool at 50% yes-truth: all-"no" scores exactly the no-share
    gold, _ = make_gold(per_role=40, yes_every=2)
    from labelcascade.crowd.hits import assemble_hit

    spec = assemble_hit("hit-s", "kitchen", TARGETS, gold, seed=13)
    assignment = HitAssignment("hit-s", "spam", tuple([False] * 205))
    hidden = grade_hidden(assignment, spec)
    assert hidden.correct <= 14  # far below the 17 bar on a ~50% yes pool
    assert not hidden.passed


def test_wrong_answer_count_rejected():
    with pytest.raises(InvalidArgumentError):
        HitAssignment("hit-1", "w-1", tuple([True] * 204))


def test_record_submission_pass_pass_yields_150_target_events():
    spec = build_hit(seed=14)
    assignment = HitAssignment(
        "hit-1", "w-1", answers_with_check_errors(spec, KIND_ONLINE, wrong=0)
    )
    outcome = record_submission(assignment, spec)
    assert outcome.accepted
    assert len(outcome.label_events) == 150
    target_ids = {slot.item_id for slot in spec.slots if slot.kind == KIND_TARGET}
    assert {event.item_id for event in outcome.label_events} == target_ids


def test_record_submission_online_failure_blocks_and_permits_retry():
    spec = build_hit(seed=15)
    assignment = HitAssignment(
        "hit-1", "w-1", answers_with_check_errors(spec, KIND_ONLINE, wrong=3)
    )
    outcome = record_submission(assignment, spec)
    assert outcome.verdict == "rejected_online"
    assert outcome.resubmit_allowed
    assert outcome.label_events == ()
    assert outcome.hidden is None  # never graded


def test_record_submission_hidden_failure_discards():
    spec = build_hit(seed=16)
    assignment = HitAssignment(
        "hit-1", "w-1", answers_with_check_errors(spec, KIND_HIDDEN, wrong=4)
    )
    outcome = record_submission(assignment, spec)
    assert outcome.verdict == "rejected_hidden"
    assert not outcome.resubmit_allowed
    assert outcome.label_events == ()


def test_gold_answers_never_become_label_events():
    spec = build_hit(seed=17)
    assignment = HitAssignment(
        "hit-1", "w-1", answers_with_check_errors(spec, KIND_ONLINE, wrong=0)
    )
    outcome = record_submission(assignment, spec)
    gold_ids = {slot.item_id for slot in spec.slots if slot.kind != KIND_TARGET}
    assert not gold_ids & {event.item_id for event in outcome.label_events}
