"""HIT assembly and client-payload redaction.

Every HIT presents 205 ordered slots: 15 tutorial slots first, then 150
target, 20 online-gold, and 20 hidden-gold slots interleaved uniformly at
random. The client payload carries tutorial truths (for instant feedback)
and online truths (the pre-submission check runs client-side), but hidden
slots are serialized exactly like targets: no truth, no marker.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from labelcascade.crowd.gold import ROLE_HIDDEN, ROLE_ONLINE, ROLE_TUTORIAL, GoldItem, GoldPools
from labelcascade.errors import InvalidArgumentError, PoolExhaustedError

TARGET_COUNT = 150
TUTORIAL_COUNT = 15
ONLINE_COUNT = 20
HIDDEN_COUNT = 20
HIT_TOTAL = TARGET_COUNT + TUTORIAL_COUNT + ONLINE_COUNT + HIDDEN_COUNT  # 205

KIND_TARGET = "target"
KIND_TUTORIAL = "tutorial"
KIND_ONLINE = "online"
KIND_HIDDEN = "hidden"


@dataclass(frozen=True)
class Slot:
    position: int  # 1-based within the HIT
    kind: str
    item_id: str
    url: str
    truth: bool | None = None  # gold slots only
    explanation: str = ""  # tutorial slots only


@dataclass(frozen=True)
class HitSpec:
    hit_id: str
    category: str
    slots: tuple[Slot, ...]

    def slots_of_kind(self, kind: str) -> list[Slot]:
        return [slot for slot in self.slots if slot.kind == kind]

    def target_ids(self) -> list[str]:
        return [slot.item_id for slot in self.slots if slot.kind == KIND_TARGET]


def _draw_gold(
    pool: Sequence[GoldItem],
    count: int,
    role: str,
    rng: random.Random,
    used_ids: set[str],
    avoid: frozenset[str],
) -> list[GoldItem]:
    eligible = [g for g in pool if g.item_id not in used_ids]
    if len(eligible) < count:
        raise PoolExhaustedError(role, count, len(eligible))
    # best effort on the memorization window: prefer gold this worker has not
    # seen recently, then backfill from the rest
    fresh = [g for g in eligible if g.item_id not in avoid]
    stale = [g for g in eligible if g.item_id in avoid]
    if len(fresh) >= count:
        chosen = rng.sample(fresh, count)
    else:
        chosen = fresh + rng.sample(stale, count - len(fresh))
        rng.shuffle(chosen)
    used_ids.update(g.item_id for g in chosen)
    return chosen


def assemble_hit(
    hit_id: str,
    category: str,
    targets: Sequence[tuple[str, str]],
    gold: GoldPools,
    seed: int,
    avoid_gold: frozenset[str] = frozenset(),
) -> HitSpec:
    """Build one 205-slot HIT from exactly 150 target (id, url) pairs.

    Deterministic given the seed. ``avoid_gold`` lists gold ids the
    requesting worker saw recently; they are skipped while the pools can
    afford it.
    """
    if len(targets) != TARGET_COUNT:
        raise InvalidArgumentError(f"a HIT needs exactly {TARGET_COUNT} targets, got {len(targets)}")
    target_ids = [item_id for item_id, _ in targets]
    if len(set(target_ids)) != len(target_ids):
        raise InvalidArgumentError("duplicate target item in HIT")

    rng = random.Random(seed)
    used: set[str] = set(target_ids)
    tutorial = _draw_gold(gold.tutorial, TUTORIAL_COUNT, ROLE_TUTORIAL, rng, used, avoid_gold)
    online = _draw_gold(gold.online, ONLINE_COUNT, ROLE_ONLINE, rng, used, avoid_gold)
    hidden = _draw_gold(gold.hidden, HIDDEN_COUNT, ROLE_HIDDEN, rng, used, avoid_gold)

    body: list[tuple[str, str, str, bool | None, str]] = [
        (KIND_TARGET, item_id, url, None, "") for item_id, url in targets
    ]
    body += [(KIND_ONLINE, g.item_id, g.url, g.truth, "") for g in online]
    body += [(KIND_HIDDEN, g.item_id, g.url, g.truth, "") for g in hidden]
    rng.shuffle(body)

    slots = [
        Slot(position=i + 1, kind=KIND_TUTORIAL, item_id=g.item_id, url=g.url, truth=g.truth,
             explanation=g.explanation)
        for i, g in enumerate(tutorial)
    ]
    slots += [
        Slot(position=TUTORIAL_COUNT + i + 1, kind=kind, item_id=item_id, url=url,
             truth=truth, explanation=explanation)
        for i, (kind, item_id, url, truth, explanation) in enumerate(body)
    ]
    return HitSpec(hit_id=hit_id, category=category, slots=tuple(slots))


def validate_hit(spec: HitSpec) -> None:
    """Structural invariants; raises AssertionError on violation."""
    if len(spec.slots) != HIT_TOTAL:
        raise AssertionError(f"HIT has {len(spec.slots)} slots, want {HIT_TOTAL}")
    kinds = {kind: 0 for kind in (KIND_TARGET, KIND_TUTORIAL, KIND_ONLINE, KIND_HIDDEN)}
    ids = set()
    for index, slot in enumerate(spec.slots):
        if slot.position != index + 1:
            raise AssertionError("slot positions must be 1..205 in order")
        kinds[slot.kind] += 1
        if slot.item_id in ids:
            raise AssertionError(f"duplicate item {slot.item_id} within HIT")
        ids.add(slot.item_id)
    expected = {
        KIND_TARGET: TARGET_COUNT,
        KIND_TUTORIAL: TUTORIAL_COUNT,
        KIND_ONLINE: ONLINE_COUNT,
        KIND_HIDDEN: HIDDEN_COUNT,
    }
    if kinds != expected:
        raise AssertionError(f"slot composition {kinds} != {expected}")
    for slot in spec.slots[:TUTORIAL_COUNT]:
        if slot.kind != KIND_TUTORIAL:
            raise AssertionError("slots 1..15 must be tutorial")


def redact_for_client(spec: HitSpec, instructions: Mapping | None = None) -> dict:
    """Client payload for one HIT.

    Hidden slots come out indistinguishable from targets: same keys, kind
    "target", no truth. Tutorial slots keep truth and explanation so the
    interface can give blocking feedback; online slots keep truth because
    the pre-submission check runs in the client.
    """
    slots = []
    for slot in spec.slots:
        entry: dict = {"position": slot.position, "item_id": slot.item_id, "url": slot.url}
        if slot.kind == KIND_TUTORIAL:
            entry["kind"] = KIND_TUTORIAL
            entry["truth"] = "yes" if slot.truth else "no"
            entry["explanation"] = slot.explanation
        elif slot.kind == KIND_ONLINE:
            entry["kind"] = KIND_ONLINE
            entry["truth"] = "yes" if slot.truth else "no"
        else:
            entry["kind"] = KIND_TARGET
        slots.append(entry)
    payload = {
        "hit_id": spec.hit_id,
        "category": spec.category,
        "slot_count": HIT_TOTAL,
        "slots": slots,
    }
    if instructions is not None:
        payload["instructions"] = dict(instructions)
    return payload
