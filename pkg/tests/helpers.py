"""Shared builders for service-level tests."""

from __future__ import annotations

import random

from labelcascade.clock import SimClock
from labelcascade.crowd.gold import ROLE_HIDDEN, ROLE_ONLINE, ROLE_TUTORIAL, GoldItem, GoldPools
from labelcascade.crowd.hits import KIND_ONLINE, KIND_TUTORIAL
from labelcascade.pool.store import PoolStore
from labelcascade.pool.types import CategorySpec
from labelcascade.svc.service import LabelingService, ServiceConfig

CATEGORY = "kitchen"


def make_rows(n, category=CATEGORY, start=0, with_features=True):
    rows = []
    for index in range(start, start + n):
        row = {
            "id": f"i-{index:06d}",
            "url": f"https://img.test/{category}/{index:06d}.jpg",
            "width": 512,
            "height": 384,
            "category": category,
        }
        if with_features:
            row["features"] = [((index * 37) % 100) / 100.0 - 0.5, (index % 7) / 7.0, 0.25]
        rows.append(row)
    return rows


def make_gold(per_role=30, yes_every=2, start=900_000):
    """Gold pools with ids shaped like item ids; truth alternates."""
    pools = GoldPools()
    truth = {}
    offset = start
    for role in (ROLE_TUTORIAL, ROLE_ONLINE, ROLE_HIDDEN):
        for j in range(per_role):
            item_id = f"i-{offset:06d}"
            offset += 1
            is_yes = j % yes_every == 0
            pools.add(
                GoldItem(
                    item_id=item_id,
                    truth=is_yes,
                    role=role,
                    url=f"https://img.test/gold/{item_id}.jpg",
                    explanation="Look at the whole frame." if role == ROLE_TUTORIAL else "",
                )
            )
            truth[item_id] = is_yes
    return pools, truth


def make_service(n_items=150, per_role=30, seed=0, policy=None, clock=None):
    """Store + service with one category, n_items unlabeled, gold pools."""
    clock = clock or SimClock(start=0)
    store = PoolStore(journal=None, clock=clock)
    store.ingest_manifest(make_rows(n_items), category=CATEGORY)
    gold, gold_truth = make_gold(per_role=per_role)
    config = (
        ServiceConfig(seed=seed, policy=policy) if policy is not None else ServiceConfig(seed=seed)
    )
    service = LabelingService(store, config, clock=clock)
    service.register_category(
        CategorySpec(name=CATEGORY, definition_text="A room where food is cooked."), gold
    )
    truth = {row["id"]: (idx % 3 == 0) for idx, row in enumerate(make_rows(n_items))}
    truth.update(gold_truth)
    return service, store, clock, truth


def answers_for(payload, truth, flip_ids=(), spam=False):
    """Answer a redacted payload from a truth map.

    Tutorial and online slots use payload truths (the client enforces
    tutorials; online truths are client-visible anyway); target-looking
    slots use the truth map. ``flip_ids`` inverts specific items.
    """
    answers = []
    for slot in payload["slots"]:
        if spam:
            answers.append("no")
            continue
        if slot.get("kind") in (KIND_TUTORIAL, KIND_ONLINE):
            value = slot["truth"] == "yes"
        else:
            value = truth[slot["item_id"]]
        if slot["item_id"] in flip_ids:
            value = not value
        answers.append("yes" if value else "no")
    return answers


def label_batch(service, truth, workers=("w-a", "w-b"), category=CATEGORY, max_rounds=40):
    """Drive the given workers until the category has no pending work."""
    tokens = {w: service.create_session(w)["token"] for w in workers}
    rng = random.Random(0)
    rounds = 0
    while service.pending_work(category) and rounds < max_rounds:
        rounds += 1
        for worker in workers:
            while True:
                try:
                    payload = service.next_hit(tokens[worker], category)
                except Exception:
                    break
                service.submit_hit(tokens[worker], payload["hit_id"], answers_for(payload, truth))
        service.reclaim_expired()
    return rounds
