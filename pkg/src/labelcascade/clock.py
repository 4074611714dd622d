"""Clock abstraction so simulations and replay stay deterministic."""

from __future__ import annotations

import time
from datetime import datetime, timezone
from typing import Protocol


def to_utc_string(epoch_seconds: int) -> str:
    """Render an epoch second as an ISO-8601 UTC timestamp (seconds precision)."""
    return datetime.fromtimestamp(int(epoch_seconds), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class Clock(Protocol):
    def now(self) -> int:
        """Current time as integer epoch seconds."""
        ...


class SystemClock:
    def now(self) -> int:
        return int(time.time())


class SimClock:
    """Manually advanced clock; every reading is reproducible."""

    def __init__(self, start: int = 0):
        self._now = int(start)

    def now(self) -> int:
        return self._now

    def advance(self, seconds: int) -> int:
        if seconds < 0:
            raise ValueError("clock cannot run backwards")
        self._now += int(seconds)
        return self._now
