"""Domain types for the candidate-item pool."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class ItemState(str, enum.Enum):
    """Lifecycle state of a candidate item.

    Legal edges are listed in LEGAL_TRANSITIONS; every other edge is a
    state conflict. Terminal states have no outgoing edges.
    """

    UNLABELED = "unlabeled"
    IN_FLIGHT = "in_flight"
    HUMAN_POSITIVE = "human_positive"
    HUMAN_NEGATIVE = "human_negative"
    AUTO_POSITIVE = "auto_positive"
    AUTO_NEGATIVE = "auto_negative"
    REJECTED_AT_INGEST = "rejected_at_ingest"


LEGAL_TRANSITIONS: dict[ItemState, frozenset[ItemState]] = {
    ItemState.UNLABELED: frozenset(
        {ItemState.IN_FLIGHT, ItemState.AUTO_POSITIVE, ItemState.AUTO_NEGATIVE}
    ),
    ItemState.IN_FLIGHT: frozenset(
        {ItemState.HUMAN_POSITIVE, ItemState.HUMAN_NEGATIVE, ItemState.UNLABELED}
    ),
    ItemState.HUMAN_POSITIVE: frozenset(),
    ItemState.HUMAN_NEGATIVE: frozenset(),
    ItemState.AUTO_POSITIVE: frozenset(),
    ItemState.AUTO_NEGATIVE: frozenset(),
    ItemState.REJECTED_AT_INGEST: frozenset(),
}

TERMINAL_STATES = frozenset(
    {
        ItemState.HUMAN_POSITIVE,
        ItemState.HUMAN_NEGATIVE,
        ItemState.AUTO_POSITIVE,
        ItemState.AUTO_NEGATIVE,
        ItemState.REJECTED_AT_INGEST,
    }
)

POSITIVE_STATES = frozenset({ItemState.HUMAN_POSITIVE, ItemState.AUTO_POSITIVE})
NEGATIVE_STATES = frozenset({ItemState.HUMAN_NEGATIVE, ItemState.AUTO_NEGATIVE})


@dataclass(frozen=True)
class CategorySpec:
    """One labeling category and the material shown to annotators."""

    name: str
    kind: str = "scene"  # "scene" or "object"
    definition_text: str = ""
    adjectives: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("category name must be nonempty")
        if self.kind not in ("scene", "object"):
            raise ValueError(f"unknown category kind {self.kind!r}")


@dataclass
class ItemRecord:
    """One candidate image and its lifecycle history.

    ``state_history`` holds (state, timestamp, provenance) triples; the
    first entry is always the ingest event.
    """

    id: str
    url: str
    width: int
    height: int
    category: str
    features: tuple[float, ...] | None = None
    state: ItemState = ItemState.UNLABELED
    state_history: list[tuple[str, int, str]] = field(default_factory=list)
    resolved_iteration: int | None = None


@dataclass
class IngestReport:
    """Counts for one manifest ingest.

    Invariant: seen == duplicate_urls + rejected_size + accepted. Malformed
    rows are counted separately and are not part of ``seen``.
    """

    seen: int = 0
    duplicate_urls: int = 0
    rejected_size: int = 0
    accepted: int = 0
    malformed: int = 0

    def check(self) -> None:
        if self.seen != self.duplicate_urls + self.rejected_size + self.accepted:
            raise AssertionError(f"ingest conservation violated: {self}")

    def as_dict(self) -> dict:
        return {
            "seen": self.seen,
            "duplicate_urls": self.duplicate_urls,
            "rejected_size": self.rejected_size,
            "accepted": self.accepted,
            "malformed": self.malformed,
        }
