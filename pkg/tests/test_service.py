from __future__ import annotations

import json

import pytest

from labelcascade.crowd.hits import KIND_ONLINE
from labelcascade.errors import (
    DuplicateSubmissionError,
    MalformedSubmissionError,
    NotFoundError,
    NoWorkError,
    SessionExpiredError,
    WorkerBlockedError,
)
from labelcascade.pool.types import ItemState

from helpers import CATEGORY, answers_for, make_service


def enqueue_all(service, store, iteration=1):
    ids = store.ids_in(ItemState.UNLABELED)
    service.enqueue_targets(CATEGORY, ids, iteration)
    return ids


# -- sessions -------------------------------------------------------------------


def test_fresh_worker_gets_a_token():
    service, *_ = make_service()
    session = service.create_session("w-1")
    assert session["token"].startswith("tok-")
    assert session["worker_id"] == "w-1"


def test_blocked_worker_rejected_at_session_creation():
    service, *_ = make_service()
    service.profile("w-bad").blocked = True
    with pytest.raises(WorkerBlockedError):
        service.create_session("w-bad")


def test_expired_token_rejected_on_later_calls():
    service, store, clock, truth = make_service()
    token = service.create_session("w-1")["token"]
    enqueue_all(service, store)
    clock.advance(service.config.session_ttl_s + 1)
    with pytest.raises(SessionExpiredError):
        service.next_hit(token, CATEGORY)


def test_unknown_token_rejected():
    service, *_ = make_service()
    with pytest.raises(SessionExpiredError):
        service.next_hit("tok-bogus", CATEGORY)


# -- HIT serving -------------------------------------------------------------------


def test_two_workers_share_the_same_hit():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    token_a = service.create_session("w-a")["token"]
    token_b = service.create_session("w-b")["token"]
    payload_a = service.next_hit(token_a, CATEGORY)
    payload_b = service.next_hit(token_b, CATEGORY)
    assert payload_a["hit_id"] == payload_b["hit_id"]  # redundancy 2


def test_same_worker_never_holds_one_hit_twice():
    service, store, clock, truth = make_service(n_items=300)
    enqueue_all(service, store)
    token = service.create_session("w-a")["token"]
    first = service.next_hit(token, CATEGORY)
    second = service.next_hit(token, CATEGORY)
    assert first["hit_id"] != second["hit_id"]


def test_empty_queue_is_no_work():
    service, *_ = make_service()
    token = service.create_session("w-a")["token"]
    with pytest.raises(NoWorkError):
        service.next_hit(token, CATEGORY)


def test_targets_move_to_in_flight_on_issue():
    service, store, clock, truth = make_service()
    ids = enqueue_all(service, store)
    token = service.create_session("w-a")["token"]
    service.next_hit(token, CATEGORY)
    assert store.count(ItemState.IN_FLIGHT) == len(ids)


def test_payload_is_redacted_and_carries_instructions():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    token = service.create_session("w-a")["token"]
    payload = service.next_hit(token, CATEGORY)
    serialized = json.dumps(payload)
    assert "hidden" not in serialized
    assert {slot["kind"] for slot in payload["slots"]} == {"tutorial", "online", "target"}
    assert payload["instructions"]["definition"] == "A room where food is cooked."
    assert payload["instructions"]["examples"]


# -- submissions -------------------------------------------------------------------


def test_accepted_submission_yields_150_events_and_consensus_after_two():
    service, store, clock, truth = make_service()
    ids = enqueue_all(service, store)
    token_a = service.create_session("w-a")["token"]
    token_b = service.create_session("w-b")["token"]
    payload = service.next_hit(token_a, CATEGORY)
    payload_b = service.next_hit(token_b, CATEGORY)

    result_a = service.submit_hit(token_a, payload["hit_id"], answers_for(payload, truth))
    assert result_a == {"status": "accepted", "label_events": 150, "hit_id": payload["hit_id"]}
    # one label each: nothing resolves yet
    assert store.count(ItemState.HUMAN_POSITIVE) + store.count(ItemState.HUMAN_NEGATIVE) == 0

    result_b = service.submit_hit(token_b, payload_b["hit_id"], answers_for(payload_b, truth))
    assert result_b["status"] == "accepted"
    resolved = store.count(ItemState.HUMAN_POSITIVE) + store.count(ItemState.HUMAN_NEGATIVE)
    assert resolved == len(ids)
    for item_id in ids:
        expected = ItemState.HUMAN_POSITIVE if truth[item_id] else ItemState.HUMAN_NEGATIVE
        assert store.get(item_id).state is expected


def test_duplicate_submission_conflicts():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    token = service.create_session("w-a")["token"]
    payload = service.next_hit(token, CATEGORY)
    service.submit_hit(token, payload["hit_id"], answers_for(payload, truth))
    with pytest.raises(DuplicateSubmissionError):
        service.submit_hit(token, payload["hit_id"], answers_for(payload, truth))


def test_wrong_answer_count_is_malformed():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    token = service.create_session("w-a")["token"]
    payload = service.next_hit(token, CATEGORY)
    with pytest.raises(MalformedSubmissionError):
        service.submit_hit(token, payload["hit_id"], ["yes"] * 204)
    with pytest.raises(MalformedSubmissionError):
        service.submit_hit(token, payload["hit_id"], ["maybe"] * 205)


def test_submission_without_assignment_not_found():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    token_a = service.create_session("w-a")["token"]
    token_b = service.create_session("w-b")["token"]
    payload = service.next_hit(token_a, CATEGORY)
    with pytest.raises(NotFoundError):
        service.submit_hit(token_b, payload["hit_id"], ["no"] * 205)


def test_online_failure_allows_revision_and_resubmission():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    token = service.create_session("w-a")["token"]
    payload = service.next_hit(token, CATEGORY)

    online_ids = [s["item_id"] for s in payload["slots"] if s["kind"] == KIND_ONLINE]
    bad = answers_for(payload, truth, flip_ids=set(online_ids[:3]))
    result = service.submit_hit(token, payload["hit_id"], bad)
    assert result["status"] == "rejected"
    assert result["reason"] == "online_check_failed"
    assert result["resubmit_allowed"]
    assert result["online_correct"] == 17

    # the assignment stays live: revise and resubmit
    good = answers_for(payload, truth)
    assert service.submit_hit(token, payload["hit_id"], good)["status"] == "accepted"


def test_hidden_failure_is_opaque_and_reopens_the_slot():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    token = service.create_session("w-a")["token"]
    payload = service.next_hit(token, CATEGORY)

    # flip four hidden answers: hidden slots are the "target"-looking slots
    # whose ids are not pool items
    hidden_ids = [
        s["item_id"]
        for s in payload["slots"]
        if s["kind"] == "target" and s["item_id"] not in store
    ]
    assert len(hidden_ids) == 20
    result = service.submit_hit(
        token, payload["hit_id"], answers_for(payload, truth, flip_ids=set(hidden_ids[:4]))
    )
    assert result == {
        "status": "rejected",
        "reason": "quality_check_failed",
        "resubmit_allowed": False,
    }  # exactly these keys: no per-item breakdown, no counts

    # reputation took the hit (16/20 = 0.8 < 0.85 over a 1-deep window)
    assert service.profile("w-a").blocked

    # the slot reopens for another worker
    token_b = service.create_session("w-b")["token"]
    payload_b = service.next_hit(token_b, CATEGORY)
    assert payload_b["hit_id"] == payload["hit_id"]


def test_tutorial_and_gold_answers_never_reach_the_label_store():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    tokens = [service.create_session(w)["token"] for w in ("w-a", "w-b")]
    for token in tokens:
        payload = service.next_hit(token, CATEGORY)
        service.submit_hit(token, payload["hit_id"], answers_for(payload, truth))
    labeled = service.category_state(CATEGORY).human_labeled
    assert labeled == set(store.ids_in(ItemState.HUMAN_POSITIVE)) | set(
        store.ids_in(ItemState.HUMAN_NEGATIVE)
    )
    gold = service.category_state(CATEGORY).gold
    gold_ids = {g.item_id for pool in (gold.tutorial, gold.online, gold.hidden) for g in pool}
    assert not labeled & gold_ids


# -- conflicts and the resolution path ------------------------------------------


def test_conflict_goes_to_a_third_distinct_worker():
    service, store, clock, truth = make_service()
    ids = enqueue_all(service, store)
    disputed = ids[0]

    token_a = service.create_session("w-a")["token"]
    token_b = service.create_session("w-b")["token"]
    payload_a = service.next_hit(token_a, CATEGORY)
    payload_b = service.next_hit(token_b, CATEGORY)
    service.submit_hit(token_a, payload_a["hit_id"], answers_for(payload_a, truth))
    service.submit_hit(
        token_b, payload_b["hit_id"], answers_for(payload_b, truth, flip_ids={disputed})
    )

    assert store.get(disputed).state is ItemState.IN_FLIGHT  # conflicted, not resolved
    assert service.pending_work(CATEGORY)

    # neither original worker may take the resolution HIT
    for token in (token_a, token_b):
        with pytest.raises(NoWorkError):
            service.next_hit(token, CATEGORY)

    token_c = service.create_session("w-c")["token"]
    payload_c = service.next_hit(token_c, CATEGORY)
    assert disputed in {slot["item_id"] for slot in payload_c["slots"]}
    service.submit_hit(token_c, payload_c["hit_id"], answers_for(payload_c, truth))
    expected = ItemState.HUMAN_POSITIVE if truth[disputed] else ItemState.HUMAN_NEGATIVE
    assert store.get(disputed).state is expected


def test_discard_mode_sends_conflicts_back_to_the_pool():
    from labelcascade.crowd.consensus import CONFLICT_DISCARD, ConsensusPolicy

    service, store, clock, truth = make_service(policy=ConsensusPolicy(conflict_rule=CONFLICT_DISCARD))
    ids = enqueue_all(service, store)
    disputed = ids[0]
    token_a = service.create_session("w-a")["token"]
    token_b = service.create_session("w-b")["token"]
    payload_a = service.next_hit(token_a, CATEGORY)
    payload_b = service.next_hit(token_b, CATEGORY)
    service.submit_hit(token_a, payload_a["hit_id"], answers_for(payload_a, truth))
    service.submit_hit(
        token_b, payload_b["hit_id"], answers_for(payload_b, truth, flip_ids={disputed})
    )
    assert store.get(disputed).state is ItemState.UNLABELED


# -- reclamation --------------------------------------------------------------------


def test_expired_assignment_frees_the_slot():
    service, store, clock, truth = make_service()
    enqueue_all(service, store)
    token_a = service.create_session("w-a")["token"]
    payload = service.next_hit(token_a, CATEGORY)
    clock.advance(service.config.assignment_timeout_s + 1)
    assert service.reclaim_expired() == 1

    # w-a may take the hit again after abandoning it
    payload_again = service.next_hit(token_a, CATEGORY)
    assert payload_again["hit_id"] == payload["hit_id"]


def test_drain_returns_in_flight_items_to_unlabeled():
    service, store, clock, truth = make_service()
    ids = enqueue_all(service, store)
    token = service.create_session("w-a")["token"]
    service.next_hit(token, CATEGORY)
    assert store.count(ItemState.IN_FLIGHT) == len(ids)
    service.drain(CATEGORY)
    assert store.count(ItemState.IN_FLIGHT) == 0
    assert store.count(ItemState.UNLABELED) == len(ids)
    assert not service.pending_work(CATEGORY)


# -- metrics -----------------------------------------------------------------------


def test_fresh_category_metrics():
    service, *_ = make_service()
    metrics = service.metrics(CATEGORY)
    assert metrics["iteration"] == 0
    assert metrics["amplification_ratio"] is None
    assert metrics["state_counts"]["unlabeled"] == 150


def test_unknown_category_not_found():
    service, *_ = make_service()
    with pytest.raises(NotFoundError):
        service.metrics("garage")


def test_metrics_after_labeling_round():
    service, store, clock, truth = make_service()
    ids = enqueue_all(service, store, iteration=3)
    for worker in ("w-a", "w-b"):
        token = service.create_session(worker)["token"]
        payload = service.next_hit(token, CATEGORY)
        service.submit_hit(token, payload["hit_id"], answers_for(payload, truth))
    metrics = service.metrics(CATEGORY)
    assert metrics["iteration"] == 3
    assert metrics["human_labeled_items"] == len(ids)
    assert metrics["total_resolved"] == len(ids)
    assert metrics["amplification_ratio"] == pytest.approx(1.0)
    assert metrics["submission_stats"]["accepted"] == 2
