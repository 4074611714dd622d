"""Worker reputation built on hidden-check accuracy."""

from __future__ import annotations

from dataclasses import dataclass, field

ROLLING_WINDOW = 5
BLOCK_THRESHOLD = 0.85
GOLD_MEMORY_WINDOW = 20  # HITs within which a worker should not see the same gold item


@dataclass
class WorkerProfile:
    worker_id: str
    hits_submitted: int = 0
    hidden_accuracy_history: list[float] = field(default_factory=list)
    blocked: bool = False
    recent_gold: list[frozenset[str]] = field(default_factory=list)

    def record_hidden_accuracy(self, accuracy: float) -> None:
        """Fold one graded submission into the rolling window; may block."""
        self.hits_submitted += 1
        self.hidden_accuracy_history.append(accuracy)
        window = self.hidden_accuracy_history[-ROLLING_WINDOW:]
        self.blocked = sum(window) / len(window) < BLOCK_THRESHOLD

    def note_gold_shown(self, gold_ids: frozenset[str]) -> None:
        self.recent_gold.append(gold_ids)
        if len(self.recent_gold) > GOLD_MEMORY_WINDOW:
            del self.recent_gold[0]

    def recently_seen_gold(self) -> frozenset[str]:
        seen: set[str] = set()
        for ids in self.recent_gold:
            seen.update(ids)
        return frozenset(seen)
