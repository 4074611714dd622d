"""Stochastic worker models and the crowd driver.

Honest workers answer the truth of each image with an independent per-item
flip probability; spammers leave every answer at the default "no" and give
up after one rejection. The driver pushes these workers through the public
service surface only: sessions, next_hit, submit_hit, the expiry sweep.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from labelcascade.clock import SimClock
from labelcascade.errors import NoWorkError, SessionExpiredError, WorkerBlockedError
from labelcascade.seeding import derive_seed
from labelcascade.sim.config import SimConfig
from labelcascade.svc.service import LabelingService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimWorker:
    worker_id: str
    flip_prob: float
    is_spammer: bool


def sim_label(worker: SimWorker, truth: bool, rng: random.Random) -> bool:
    """One answer: spammers say no; honest workers flip the truth rarely."""
    if worker.is_spammer:
        return False
    if rng.random() < worker.flip_prob:
        return not truth
    return truth


def build_workers(config: SimConfig) -> list[SimWorker]:
    """Worker pool with the configured spammer share; deterministic."""
    rng = random.Random(derive_seed(config.seed, "workers"))
    spammers = round(config.worker_count * config.spammer_fraction)
    workers = []
    for index in range(config.worker_count):
        flip = rng.uniform(config.worker_flip_low, config.worker_flip_high)
        workers.append(
            SimWorker(
                worker_id=f"w-{index:03d}",
                flip_prob=flip,
                is_spammer=index < spammers,
            )
        )
    return workers


def answer_payload(
    worker: SimWorker,
    payload: dict,
    truth_of: Callable[[str], bool],
    rng: random.Random,
) -> list[str]:
    """Fill a redacted HIT payload with one worker's answers.

    Tutorial slots end up correct for honest workers because the interface
    blocks until they are fixed. Everything else is the worker's own
    judgement of the image, spammers excepted.
    """
    answers = []
    for slot in payload["slots"]:
        if worker.is_spammer:
            answers.append("no")
        elif slot.get("kind") == "tutorial":
            answers.append(slot["truth"])
        else:
            answers.append("yes" if sim_label(worker, truth_of(slot["item_id"]), rng) else "no")
    return answers


def revise_online(payload: dict, answers: list[str]) -> list[str]:
    """Fix the online-check slots to their payload truths, as a worker told
    to revise would."""
    revised = list(answers)
    for slot in payload["slots"]:
        if slot.get("kind") == "online":
            revised[slot["position"] - 1] = slot["truth"]
    return revised


class SimulatedCrowd:
    """CrowdRunner that drives simulated workers through the service."""

    def __init__(
        self,
        service: LabelingService,
        workers: Sequence[SimWorker],
        clock: SimClock,
        truth_of: Callable[[str], bool],
        seed: int,
        max_passes: int = 60,
    ):
        self.service = service
        self.workers = list(workers)
        self.clock = clock
        self.truth_of = truth_of
        self.seed = seed
        self.max_passes = max_passes
        self._sessions: dict[str, str] = {}
        self.worker_stats: dict[str, dict[str, int]] = {
            w.worker_id: {"submitted": 0, "accepted": 0} for w in self.workers
        }
        self._round_counter = 0

    # -- session upkeep -----------------------------------------------------

    def _token(self, worker: SimWorker) -> str:
        token = self._sessions.get(worker.worker_id)
        if token is None:
            token = self.service.create_session(worker.worker_id)["token"]
            self._sessions[worker.worker_id] = token
        return token

    def _refresh(self, worker: SimWorker) -> str:
        self._sessions.pop(worker.worker_id, None)
        return self._token(worker)

    # -- main loop ------------------------------------------------------------

    def collect_labels(
        self, category: str, item_ids: Sequence[str], iteration: int
    ) -> dict[str, bool | None]:
        self.service.enqueue_targets(category, item_ids, iteration)
        self._round_counter += 1
        rng = random.Random(derive_seed(self.seed, "round", self._round_counter))
        passes = 0
        while self.service.pending_work(category) and passes < self.max_passes:
            passes += 1
            order = list(self.workers)
            rng.shuffle(order)
            for worker in order:
                self._work_until_dry(worker, category, rng)
            # everything still held is stale; expire it so others can take over
            self.clock.advance(self.service.config.assignment_timeout_s + 60)
            self.service.reclaim_expired()
        if passes >= self.max_passes:
            logger.warning("round for %s hit the pass limit; draining", category)
        self.service.drain(category)
        return self.service.labels_for(item_ids)

    def _work_until_dry(self, worker: SimWorker, category: str, rng: random.Random) -> None:
        while True:
            try:
                token = self._token(worker)
                payload = self.service.next_hit(token, category)
            except NoWorkError:
                return
            except WorkerBlockedError:
                return
            except SessionExpiredError:
                self._refresh(worker)
                continue
            self._attempt(worker, category, payload, rng)
            if worker.is_spammer:
                return  # one attempt per pass, then they wander off

    def _attempt(self, worker: SimWorker, category: str, payload: dict, rng: random.Random) -> None:
        token = self._sessions[worker.worker_id]
        answers = answer_payload(worker, payload, self.truth_of, rng)
        stats = self.worker_stats[worker.worker_id]
        for attempt in range(2):
            try:
                stats["submitted"] += 1
                result = self.service.submit_hit(token, payload["hit_id"], answers)
            except (WorkerBlockedError, SessionExpiredError):
                return
            if result["status"] == "accepted":
                stats["accepted"] += 1
                return
            if (
                result.get("reason") == "online_check_failed"
                and not worker.is_spammer
                and attempt == 0
            ):
                answers = revise_online(payload, answers)
                continue
            return  # hidden failure, or a spammer who will not revise
