"""Task-serving core shared by the HTTP API, the CLI, and simulations.

HITs are built lazily from per-category pending queues when a worker asks
for work. Fresh items need two accepted assignments from distinct workers;
items whose two labels conflict go around once more through a resolution
queue served as single-assignment HITs assembled per requesting worker, so
nobody ever relabels an item they already answered. All mutations reach the
shared journal through the single-writer pool store.
"""

from __future__ import annotations

import logging
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from labelcascade.clock import Clock, SystemClock, to_utc_string
from labelcascade.crowd.consensus import (
    NEEDS_MORE,
    NEGATIVE,
    POSITIVE,
    UNRESOLVED,
    ConsensusPolicy,
    LabelEvent,
    consensus,
)
from labelcascade.crowd.gold import GoldPools
from labelcascade.crowd.grading import (
    VERDICT_ACCEPTED,
    VERDICT_REJECTED_ONLINE,
    HitAssignment,
    record_submission,
)
from labelcascade.crowd.hits import (
    HIT_TOTAL,
    KIND_HIDDEN,
    KIND_ONLINE,
    KIND_TARGET,
    KIND_TUTORIAL,
    TARGET_COUNT,
    HitSpec,
    assemble_hit,
    redact_for_client,
)
from labelcascade.crowd.workers import WorkerProfile
from labelcascade.errors import (
    DuplicateSubmissionError,
    InvalidArgumentError,
    MalformedSubmissionError,
    NotFoundError,
    NoWorkError,
    SessionExpiredError,
    WorkerBlockedError,
)
from labelcascade.pool.store import PoolStore
from labelcascade.pool.types import (
    NEGATIVE_STATES,
    POSITIVE_STATES,
    CategorySpec,
    ItemState,
)
from labelcascade.seeding import derive_seed

logger = logging.getLogger(__name__)


def _locked(method):
    """Serialize a public service method through the instance mutex."""

    def wrapper(self, *args, **kwargs):
        with self._mutex:
            return method(self, *args, **kwargs)

    wrapper.__name__ = method.__name__
    wrapper.__doc__ = method.__doc__
    return wrapper


@dataclass(frozen=True)
class ServiceConfig:
    seed: int = 0
    assignment_timeout_s: int = 30 * 60
    session_ttl_s: int = 6 * 60 * 60
    policy: ConsensusPolicy = field(default_factory=ConsensusPolicy)


@dataclass
class Session:
    token: str
    worker_id: str
    issued_at: int
    expires_at: int


@dataclass
class Assignment:
    hit_id: str
    worker_id: str
    issued_at: int
    expires_at: int


@dataclass
class OpenHit:
    spec: HitSpec
    required_assignments: int
    created_at: int
    iteration: int
    accepted_workers: set[str] = field(default_factory=set)
    rejected_workers: set[str] = field(default_factory=set)
    active: dict[str, Assignment] = field(default_factory=dict)
    filler_ids: frozenset[str] = frozenset()

    def needs_worker(self) -> bool:
        return len(self.accepted_workers) + len(self.active) < self.required_assignments


@dataclass
class CategoryState:
    spec: CategorySpec
    gold: GoldPools
    fresh: deque[str] = field(default_factory=deque)
    resolution: deque[str] = field(default_factory=deque)
    resolution_queued: set[str] = field(default_factory=set)
    open_hits: list[str] = field(default_factory=list)
    iteration: int = 0
    human_labeled: set[str] = field(default_factory=set)
    thresholds_history: list[dict] = field(default_factory=list)
    audits: list[dict] = field(default_factory=list)


class LabelingService:
    """Single-process labeling service over one journaled pool store."""

    def __init__(self, store: PoolStore, config: ServiceConfig | None = None,
                 clock: Clock | None = None):
        self.store = store
        self.config = config or ServiceConfig()
        self.clock = clock or store.clock or SystemClock()
        # one writer at a time: serving threads and an in-process engine
        # share this surface
        self._mutex = threading.RLock()
        self._categories: dict[str, CategoryState] = {}
        self._hits: dict[str, OpenHit] = {}
        self._sessions: dict[str, Session] = {}
        self._workers: dict[str, WorkerProfile] = {}
        self._tally: dict[str, dict[str, bool]] = {}
        self._worker_labeled: dict[str, set[str]] = {}
        self._accepted: set[tuple[str, str]] = set()
        self._hit_counter = 0
        self._token_counter = 0
        self.submission_stats: dict[str, dict[str, int]] = {}

    # -- registration ---------------------------------------------------------

    @_locked
    def register_category(self, spec: CategorySpec, gold: GoldPools) -> None:
        if spec.name in self._categories:
            raise InvalidArgumentError(f"category {spec.name!r} already registered")
        self._categories[spec.name] = CategoryState(spec=spec, gold=gold)

    def category_state(self, category: str) -> CategoryState:
        state = self._categories.get(category)
        if state is None:
            raise NotFoundError(f"unknown category {category!r}")
        return state

    def profile(self, worker_id: str) -> WorkerProfile:
        profile = self._workers.get(worker_id)
        if profile is None:
            profile = WorkerProfile(worker_id=worker_id)
            self._workers[worker_id] = profile
        return profile

    # -- sessions ---------------------------------------------------------------

    @_locked
    def create_session(self, worker_id: str) -> dict:
        if not worker_id:
            raise InvalidArgumentError("worker_id required")
        if self.profile(worker_id).blocked:
            raise WorkerBlockedError(f"worker {worker_id} is blocked")
        self._token_counter += 1
        token = f"tok-{self._token_counter:08d}-{derive_seed(self.config.seed, 'token', self._token_counter):016x}"
        now = self.clock.now()
        session = Session(
            token=token,
            worker_id=worker_id,
            issued_at=now,
            expires_at=now + self.config.session_ttl_s,
        )
        self._sessions[token] = session
        self.store.append_event(
            "session_created", {"worker_id": worker_id, "expires_at": session.expires_at}
        )
        return {
            "token": token,
            "worker_id": worker_id,
            "issued_at": to_utc_string(session.issued_at),
            "expires_at": to_utc_string(session.expires_at),
        }

    def _session_worker(self, token: str) -> str:
        session = self._sessions.get(token)
        if session is None:
            raise SessionExpiredError("unknown session token")
        if self.clock.now() >= session.expires_at:
            raise SessionExpiredError("session expired")
        if self.profile(session.worker_id).blocked:
            raise WorkerBlockedError(f"worker {session.worker_id} is blocked")
        return session.worker_id

    # -- queueing (engine-facing) ----------------------------------------------

    @_locked
    def enqueue_targets(self, category: str, item_ids: Sequence[str], iteration: int) -> int:
        """Queue pool items for human labeling.

        All-or-nothing: every item must exist, belong to the category, and
        be unlabeled, or nothing is queued.
        """
        state = self.category_state(category)
        for item_id in item_ids:
            record = self.store.get(item_id)
            if record.category != category:
                raise InvalidArgumentError(f"item {item_id} belongs to {record.category!r}")
            if record.state is not ItemState.UNLABELED:
                raise InvalidArgumentError(f"item {item_id} is not unlabeled")
        state.fresh.extend(item_ids)
        state.iteration = iteration
        self.store.append_event(
            "targets_enqueued",
            {"category": category, "count": len(item_ids), "iteration": iteration},
        )
        return len(item_ids)

    @_locked
    def pending_work(self, category: str) -> bool:
        state = self.category_state(category)
        return bool(state.fresh or state.resolution or state.open_hits)

    @_locked
    def reclaim_expired(self) -> int:
        """Release assignments past their deadline; their slots reopen."""
        now = self.clock.now()
        released = 0
        for hit in self._hits.values():
            for worker_id in [w for w, a in hit.active.items() if a.expires_at <= now]:
                del hit.active[worker_id]
                released += 1
        if released:
            self.store.append_event("assignments_expired", {"count": released})
        return released

    @_locked
    def drain(self, category: str) -> int:
        """Abandon all open work: in-flight items return to unlabeled."""
        state = self.category_state(category)
        for hit_id in list(state.open_hits):
            self._hits.pop(hit_id, None)
        state.open_hits.clear()
        state.fresh.clear()
        state.resolution.clear()
        state.resolution_queued.clear()
        stuck = [
            item_id
            for item_id in self.store.ids_in(ItemState.IN_FLIGHT)
            if self.store.get(item_id).category == category
        ]
        self.store.bulk_transition(stuck, ItemState.UNLABELED, "human", state.iteration)
        if stuck:
            self.store.append_event("drained", {"category": category, "count": len(stuck)})
        return len(stuck)

    @_locked
    def labels_for(self, item_ids: Iterable[str]) -> dict[str, bool | None]:
        out: dict[str, bool | None] = {}
        for item_id in item_ids:
            record = self.store.get(item_id)
            if record.state is ItemState.HUMAN_POSITIVE:
                out[item_id] = True
            elif record.state is ItemState.HUMAN_NEGATIVE:
                out[item_id] = False
            else:
                out[item_id] = None
        return out

    # -- HIT serving --------------------------------------------------------------

    @_locked
    def next_hit(self, token: str, category: str) -> dict:
        """Serve one assignment: an open HIT needing a worker, else a new HIT."""
        worker_id = self._session_worker(token)
        state = self.category_state(category)
        self.reclaim_expired()

        hit = self._servable_open_hit(state, worker_id)
        if hit is None:
            hit = self._assemble_next_hit(state, worker_id)
        if hit is None:
            raise NoWorkError(f"no pending work for category {category!r}")

        now = self.clock.now()
        assignment = Assignment(
            hit_id=hit.spec.hit_id,
            worker_id=worker_id,
            issued_at=now,
            expires_at=now + self.config.assignment_timeout_s,
        )
        hit.active[worker_id] = assignment
        self.store.append_event(
            "assignment_issued",
            {"hit_id": hit.spec.hit_id, "worker_id": worker_id, "expires_at": assignment.expires_at},
        )
        gold_ids = frozenset(
            slot.item_id for slot in hit.spec.slots if slot.kind != KIND_TARGET
        )
        self.profile(worker_id).note_gold_shown(gold_ids)
        payload = redact_for_client(hit.spec, instructions=self._instructions(state))
        payload["assignment_expires_at"] = to_utc_string(assignment.expires_at)
        return payload

    def _instructions(self, state: CategoryState) -> dict:
        examples = [
            {
                "url": g.url,
                "truth": "yes" if g.truth else "no",
                "explanation": g.explanation,
            }
            for g in state.gold.tutorial[:6]
        ]
        return {
            "category": state.spec.name,
            "kind": state.spec.kind,
            "definition": state.spec.definition_text,
            "examples": examples,
        }

    def _worker_touched(self, worker_id: str, item_ids: Iterable[str]) -> bool:
        labeled = self._worker_labeled.get(worker_id)
        if not labeled:
            return False
        return any(item_id in labeled for item_id in item_ids)

    def _servable_open_hit(self, state: CategoryState, worker_id: str) -> OpenHit | None:
        for hit_id in state.open_hits:
            hit = self._hits[hit_id]
            if not hit.needs_worker():
                continue
            if worker_id in hit.accepted_workers or worker_id in hit.active:
                continue
            if worker_id in hit.rejected_workers:
                continue
            real_targets = [t for t in hit.spec.target_ids() if t not in hit.filler_ids]
            if self._worker_touched(worker_id, real_targets):
                continue
            return hit
        return None

    def _take_from_queue(self, queue: deque[str], worker_id: str, limit: int) -> list[str]:
        """Pop up to ``limit`` queue items this worker may label; others stay."""
        taken: list[str] = []
        skipped: list[str] = []
        labeled = self._worker_labeled.get(worker_id, set())
        while queue and len(taken) < limit:
            item_id = queue.popleft()
            if item_id in labeled:
                skipped.append(item_id)
            else:
                taken.append(item_id)
        queue.extendleft(reversed(skipped))
        return taken

    def _filler_targets(self, state: CategoryState, needed: int, exclude: set[str]) -> list[tuple[str, str]]:
        """Padding for a short final target group.

        Filler slots look like targets to the client but the server drops
        their answers outright: no tally, no transitions, no effect on the
        no-relabel rule or the amplification denominator. Preference order:
        items humans already resolved, then gold items, then auto-resolved
        items.
        """
        fillers: list[tuple[str, str]] = []

        def add_from_ids(ids: list[str]) -> None:
            for item_id in ids:
                if len(fillers) >= needed:
                    return
                if item_id in exclude:
                    continue
                record = self.store.get(item_id)
                if record.category != state.spec.name:
                    continue
                fillers.append((item_id, record.url))
                exclude.add(item_id)

        human_resolved = sorted(
            self.store.ids_in(ItemState.HUMAN_POSITIVE) + self.store.ids_in(ItemState.HUMAN_NEGATIVE)
        )
        add_from_ids(human_resolved)
        if len(fillers) < needed:
            for pool in (state.gold.tutorial, state.gold.online, state.gold.hidden):
                for g in pool:
                    if len(fillers) >= needed:
                        break
                    if g.item_id in exclude:
                        continue
                    fillers.append((g.item_id, g.url))
                    exclude.add(g.item_id)
        if len(fillers) < needed:
            auto_resolved = sorted(
                self.store.ids_in(ItemState.AUTO_POSITIVE) + self.store.ids_in(ItemState.AUTO_NEGATIVE)
            )
            add_from_ids(auto_resolved)
        if len(fillers) < needed:
            raise InvalidArgumentError(
                f"cannot pad HIT for {state.spec.name!r}: {needed - len(fillers)} fillers short"
            )
        return fillers

    def _assemble_next_hit(self, state: CategoryState, worker_id: str) -> OpenHit | None:
        fresh = self._take_from_queue(state.fresh, worker_id, TARGET_COUNT)
        if fresh:
            required = self.config.policy.required_confirmations
            item_ids = fresh
        else:
            item_ids = self._take_from_queue(state.resolution, worker_id, TARGET_COUNT)
            if not item_ids:
                return None
            for item_id in item_ids:
                state.resolution_queued.discard(item_id)
            required = 1

        exclude = set(item_ids)
        targets = [(item_id, self.store.get(item_id).url) for item_id in item_ids]
        filler_ids: frozenset[str] = frozenset()
        if len(targets) < TARGET_COUNT:
            fillers = self._filler_targets(state, TARGET_COUNT - len(targets), exclude)
            filler_ids = frozenset(item_id for item_id, _ in fillers)
            targets = targets + fillers

        self._hit_counter += 1
        hit_id = f"hit-{state.spec.name}-{self._hit_counter:06d}"
        spec = assemble_hit(
            hit_id=hit_id,
            category=state.spec.name,
            targets=targets,
            gold=state.gold,
            seed=derive_seed(self.config.seed, "hit", self._hit_counter),
            avoid_gold=self.profile(worker_id).recently_seen_gold(),
        )
        hit = OpenHit(
            spec=spec,
            required_assignments=required,
            created_at=self.clock.now(),
            iteration=state.iteration,
            filler_ids=filler_ids,
        )
        self._hits[hit_id] = hit
        state.open_hits.append(hit_id)
        to_flight = [
            item_id
            for item_id in item_ids
            if self.store.get(item_id).state is ItemState.UNLABELED
        ]
        self.store.bulk_transition(to_flight, ItemState.IN_FLIGHT, "human", state.iteration)
        self.store.append_event(
            "hit_assembled",
            {
                "hit_id": hit_id,
                "category": state.spec.name,
                "required_assignments": required,
                "targets": sorted(item_ids),
                "fillers": sorted(filler_ids),
            },
        )
        return hit

    # -- submissions ----------------------------------------------------------------

    @_locked
    def submit_hit(self, token: str, hit_id: str, answers: Sequence[str | bool]) -> dict:
        worker_id = self._session_worker(token)
        self.reclaim_expired()
        hit = self._hits.get(hit_id)
        if hit is None:
            raise NotFoundError(f"unknown or closed HIT {hit_id!r}")
        if (hit_id, worker_id) in self._accepted:
            raise DuplicateSubmissionError(f"worker {worker_id} already submitted {hit_id}")
        if worker_id not in hit.active:
            raise NotFoundError(f"no active assignment of {hit_id} for worker {worker_id}")
        decoded = self._decode_answers(answers)
        assignment = HitAssignment(
            hit_id=hit_id, worker_id=worker_id, answers=decoded, submitted_at=self.clock.now()
        )
        outcome = record_submission(assignment, hit.spec)
        self._note_submission(hit.spec.category, outcome.verdict, worker_id)
        self.store.append_event(
            "submission",
            {
                "hit_id": hit_id,
                "worker_id": worker_id,
                "verdict": outcome.verdict,
                "online_correct": outcome.online.correct,
                "hidden_correct": outcome.hidden.correct if outcome.hidden else None,
                "answers": "".join("y" if a else "n" for a in decoded),
            },
        )

        if outcome.verdict == VERDICT_REJECTED_ONLINE:
            # the worker may revise and resubmit; the assignment stays live
            wrong = [
                slot.position
                for slot in hit.spec.slots
                if slot.kind == KIND_ONLINE
                and decoded[slot.position - 1] != slot.truth
            ]
            return {
                "status": "rejected",
                "reason": "online_check_failed",
                "resubmit_allowed": True,
                "online_correct": outcome.online.correct,
                "online_required": 18,
                "wrong_online_positions": wrong,
            }

        profile = self.profile(worker_id)
        assert outcome.hidden is not None
        profile.record_hidden_accuracy(outcome.hidden.accuracy)

        if not outcome.accepted:
            del hit.active[worker_id]
            hit.rejected_workers.add(worker_id)
            # no per-item detail: the response must not reveal hidden slots
            return {
                "status": "rejected",
                "reason": "quality_check_failed",
                "resubmit_allowed": False,
            }

        del hit.active[worker_id]
        hit.accepted_workers.add(worker_id)
        self._accepted.add((hit_id, worker_id))
        self._worker_labeled.setdefault(worker_id, set()).update(
            item_id for item_id in hit.spec.target_ids() if item_id not in hit.filler_ids
        )
        state = self.category_state(hit.spec.category)
        recorded = self._apply_label_events(state, hit, outcome.label_events)
        if len(hit.accepted_workers) >= hit.required_assignments:
            self._close_hit(state, hit)
        return {
            "status": "accepted",
            "label_events": recorded,
            "hit_id": hit_id,
        }

    def _decode_answers(self, answers: Sequence[str | bool]) -> tuple[bool, ...]:
        if len(answers) != HIT_TOTAL:
            raise MalformedSubmissionError(
                f"expected {HIT_TOTAL} answers, got {len(answers)}"
            )
        decoded = []
        for value in answers:
            if isinstance(value, bool):
                decoded.append(value)
            elif value in ("yes", "y", "true"):
                decoded.append(True)
            elif value in ("no", "n", "false"):
                decoded.append(False)
            else:
                raise MalformedSubmissionError(f"bad answer value {value!r}")
        return tuple(decoded)

    def _note_submission(self, category: str, verdict: str, worker_id: str) -> None:
        stats = self.submission_stats.setdefault(
            category, {"submitted": 0, "accepted": 0, "rejected_online": 0, "rejected_hidden": 0}
        )
        stats["submitted"] += 1
        if verdict == VERDICT_ACCEPTED:
            stats["accepted"] += 1
        elif verdict == VERDICT_REJECTED_ONLINE:
            stats["rejected_online"] += 1
        else:
            stats["rejected_hidden"] += 1

    def _apply_label_events(
        self, state: CategoryState, hit: OpenHit, events: Sequence[LabelEvent]
    ) -> int:
        recorded = 0
        for event in events:
            if event.item_id in hit.filler_ids:
                continue  # padding slot: the answer is discarded
            if event.item_id not in self.store:
                continue
            record = self.store.get(event.item_id)
            if record.category != state.spec.name:
                continue
            self._tally.setdefault(event.item_id, {})[event.worker_id] = event.answer
            state.human_labeled.add(event.item_id)
            recorded += 1
            if record.state is not ItemState.IN_FLIGHT:
                continue  # already resolved; first resolution wins
            votes = [
                LabelEvent(item_id=event.item_id, worker_id=w, answer=a)
                for w, a in self._tally[event.item_id].items()
            ]
            outcome = consensus(votes, self.config.policy)
            if outcome == POSITIVE:
                self.store.transition(
                    event.item_id, ItemState.HUMAN_POSITIVE, "human", hit.iteration
                )
            elif outcome == NEGATIVE:
                self.store.transition(
                    event.item_id, ItemState.HUMAN_NEGATIVE, "human", hit.iteration
                )
            elif outcome == UNRESOLVED:
                self.store.transition(event.item_id, ItemState.UNLABELED, "human", hit.iteration)
            elif outcome == NEEDS_MORE and len(self._tally[event.item_id]) >= 2:
                if event.item_id not in state.resolution_queued:
                    state.resolution.append(event.item_id)
                    state.resolution_queued.add(event.item_id)
        return recorded

    def _close_hit(self, state: CategoryState, hit: OpenHit) -> None:
        hit_id = hit.spec.hit_id
        self._hits.pop(hit_id, None)
        if hit_id in state.open_hits:
            state.open_hits.remove(hit_id)
        self.store.append_event("hit_closed", {"hit_id": hit_id})

    # -- metrics -------------------------------------------------------------------

    @_locked
    def record_thresholds(self, category: str, iteration: int, thresholds: dict) -> None:
        self.category_state(category).thresholds_history.append(
            {"iteration": iteration, **thresholds}
        )

    @_locked
    def record_audit(self, category: str, audit: dict) -> None:
        self.category_state(category).audits.append(audit)

    @_locked
    def category_counts(self, category: str) -> dict[str, int]:
        self.category_state(category)
        return self.store.counts_for_category(category)

    @_locked
    def human_labeled_count(self, category: str) -> int:
        return len(self.category_state(category).human_labeled)

    @_locked
    def metrics(self, category: str) -> dict:
        state = self.category_state(category)
        counts = self.category_counts(category)
        resolved = sum(
            counts[item_state.value] for item_state in (POSITIVE_STATES | NEGATIVE_STATES)
        )
        human_labeled = len(state.human_labeled)
        ratio = resolved / human_labeled if human_labeled else None
        return {
            "category": category,
            "iteration": state.iteration,
            "state_counts": counts,
            "thresholds_history": list(state.thresholds_history),
            "human_labeled_items": human_labeled,
            "total_resolved": resolved,
            "amplification_ratio": ratio,
            "audits": list(state.audits),
            "submission_stats": dict(
                self.submission_stats.get(
                    category,
                    {"submitted": 0, "accepted": 0, "rejected_online": 0, "rejected_hidden": 0},
                )
            ),
        }
