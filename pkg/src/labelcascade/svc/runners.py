"""Crowd runner that waits for real submissions arriving through the service.

Used when the cascade engine runs inside a serving process: the engine
enqueues a batch and blocks here while workers label it over HTTP. The
sweep keeps abandoned assignments from wedging a round.
"""

from __future__ import annotations

import logging
import time
from typing import Sequence

from labelcascade.svc.service import LabelingService

logger = logging.getLogger(__name__)


class ServiceCrowd:
    def __init__(
        self,
        service: LabelingService,
        poll_interval_s: float = 2.0,
        round_deadline_s: float | None = None,
    ):
        self.service = service
        self.poll_interval_s = poll_interval_s
        self.round_deadline_s = round_deadline_s

    def collect_labels(
        self, category: str, item_ids: Sequence[str], iteration: int
    ) -> dict[str, bool | None]:
        self.service.enqueue_targets(category, item_ids, iteration)
        started = time.monotonic()
        while self.service.pending_work(category):
            if (
                self.round_deadline_s is not None
                and time.monotonic() - started > self.round_deadline_s
            ):
                logger.warning("labeling round for %s timed out; draining", category)
                break
            self.service.reclaim_expired()
            time.sleep(self.poll_interval_s)
        self.service.drain(category)
        return self.service.labels_for(item_ids)
