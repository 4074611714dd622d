"""Journaled candidate-item store.

Single-writer: every mutation happens under one lock and is recorded in the
journal before it is applied, so replaying the journal from an empty store
reproduces the exported state byte for byte. Reads of exported data take
the lock briefly and return plain values that are safe to share.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import threading
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from labelcascade.clock import Clock, SystemClock
from labelcascade.errors import (
    InvalidArgumentError,
    JournalCorruptError,
    NotFoundError,
    StateConflictError,
)
from labelcascade.pool.journal import Journal, JournalEvent, NullJournal, read_events
from labelcascade.pool.types import (
    LEGAL_TRANSITIONS,
    NEGATIVE_STATES,
    POSITIVE_STATES,
    IngestReport,
    ItemRecord,
    ItemState,
)

logger = logging.getLogger(__name__)

EVENT_INGEST = "item_ingested"
EVENT_TRANSITION = "transition"
EVENT_BULK_TRANSITION = "bulk_transition"
POOL_EVENT_KINDS = {EVENT_INGEST, EVENT_TRANSITION, EVENT_BULK_TRANSITION}


def derive_item_id(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest()[:16]


class PoolStore:
    """In-memory item store backed by an append-only journal."""

    def __init__(self, journal: Journal | NullJournal | None = None, clock: Clock | None = None):
        self.journal = journal or NullJournal()
        self.clock = clock or SystemClock()
        self._lock = threading.RLock()
        self._items: dict[str, ItemRecord] = {}
        self._url_seen: set[str] = set()
        self._state_index: dict[ItemState, set[str]] = {state: set() for state in ItemState}
        self._category_dims: dict[str, int] = {}
        self.last_seq = 0

    # -- journal plumbing ---------------------------------------------------

    def _record(self, kind: str, payload: dict) -> None:
        event = self.journal.append(kind, payload, self.clock.now())
        if event is not None:
            self.last_seq = event.seq

    def append_event(self, kind: str, payload: dict) -> None:
        """Record a non-pool event (service bookkeeping) in the shared journal."""
        if kind in POOL_EVENT_KINDS:
            raise InvalidArgumentError(f"event kind {kind!r} is reserved for pool mutations")
        with self._lock:
            self._record(kind, payload)

    # -- ingest -------------------------------------------------------------

    def ingest_manifest(
        self,
        rows: Iterable[Mapping | str],
        category: str,
        min_dim: int = 256,
        store_rejected: bool = False,
    ) -> IngestReport:
        """Ingest raw manifest rows for one category.

        Exact-string URL duplicates are dropped after the first occurrence.
        Items whose smaller dimension is not strictly greater than
        ``min_dim`` count as rejected_size (kept as REJECTED_AT_INGEST only
        when ``store_rejected``). Malformed rows are counted and skipped;
        they never abort the stream.
        """
        report = IngestReport()
        with self._lock:
            for raw in rows:
                parsed = self._parse_row(raw, category)
                if parsed is None:
                    report.malformed += 1
                    continue
                report.seen += 1
                item_id, url, width, height, features, row_category = parsed
                if url in self._url_seen:
                    report.duplicate_urls += 1
                    continue
                self._url_seen.add(url)
                if min(width, height) <= min_dim:
                    report.rejected_size += 1
                    if not store_rejected:
                        continue
                    state = ItemState.REJECTED_AT_INGEST
                else:
                    report.accepted += 1
                    state = ItemState.UNLABELED
                if item_id in self._items:
                    # distinct URL colliding on an explicit id: refuse the row
                    report.seen -= 1
                    report.malformed += 1
                    if state is ItemState.UNLABELED:
                        report.accepted -= 1
                    else:
                        report.rejected_size -= 1
                    self._url_seen.discard(url)
                    logger.warning("duplicate item id %s for distinct url, row skipped", item_id)
                    continue
                payload = {
                    "id": item_id,
                    "url": url,
                    "width": width,
                    "height": height,
                    "category": row_category,
                    "features": list(features) if features is not None else None,
                    "state": state.value,
                }
                self._record(EVENT_INGEST, payload)
                self._apply_ingest(payload, self.clock.now())
        report.check()
        return report

    def _parse_row(self, raw: Mapping | str, default_category: str) -> tuple | None:
        if isinstance(raw, (str, bytes)):
            try:
                raw = json.loads(raw)
            except (ValueError, UnicodeDecodeError):
                return None
        if not isinstance(raw, Mapping):
            return None
        url = raw.get("url")
        width = raw.get("width")
        height = raw.get("height")
        if not isinstance(url, str) or not url:
            return None
        if not isinstance(width, int) or not isinstance(height, int) or width <= 0 or height <= 0:
            return None
        item_id = raw.get("id")
        if item_id is None:
            item_id = derive_item_id(url)
        elif not isinstance(item_id, str) or not item_id:
            return None
        category = raw.get("category", default_category)
        if not isinstance(category, str) or not category:
            return None
        features = raw.get("features")
        if features is not None:
            if not isinstance(features, (list, tuple)) or not features:
                return None
            try:
                features = tuple(float(v) for v in features)
            except (TypeError, ValueError):
                return None
            known_dim = self._category_dims.get(category)
            if known_dim is not None and len(features) != known_dim:
                return None
        return item_id, url, width, height, features, category

    def _apply_ingest(self, payload: dict, timestamp: int) -> None:
        state = ItemState(payload["state"])
        features = payload.get("features")
        record = ItemRecord(
            id=payload["id"],
            url=payload["url"],
            width=payload["width"],
            height=payload["height"],
            category=payload["category"],
            features=tuple(features) if features is not None else None,
            state=state,
            state_history=[(state.value, timestamp, "ingest")],
        )
        self._items[record.id] = record
        self._state_index[state].add(record.id)
        if record.features is not None:
            self._category_dims.setdefault(record.category, len(record.features))

    # -- lifecycle ----------------------------------------------------------

    def transition(
        self, item_id: str, new_state: ItemState, provenance: str, iteration: int
    ) -> ItemRecord:
        """Move one item along a legal lifecycle edge; journaled."""
        with self._lock:
            self._check_transition(item_id, new_state)
            payload = {
                "id": item_id,
                "state": new_state.value,
                "provenance": provenance,
                "iteration": iteration,
            }
            self._record(EVENT_TRANSITION, payload)
            self._apply_transition(item_id, new_state, provenance, iteration, self.clock.now())
            return self._items[item_id]

    def bulk_transition(
        self, item_ids: Iterable[str], new_state: ItemState, provenance: str, iteration: int
    ) -> int:
        """Transition many items along the same edge with one journal event.

        All-or-nothing: every edge is validated before any is applied.
        """
        ids = sorted(item_ids)
        with self._lock:
            for item_id in ids:
                self._check_transition(item_id, new_state)
            if not ids:
                return 0
            payload = {
                "ids": ids,
                "state": new_state.value,
                "provenance": provenance,
                "iteration": iteration,
            }
            self._record(EVENT_BULK_TRANSITION, payload)
            now = self.clock.now()
            for item_id in ids:
                self._apply_transition(item_id, new_state, provenance, iteration, now)
        return len(ids)

    def _check_transition(self, item_id: str, new_state: ItemState) -> None:
        record = self._items.get(item_id)
        if record is None:
            raise NotFoundError(f"unknown item {item_id!r}")
        if new_state not in LEGAL_TRANSITIONS[record.state]:
            raise StateConflictError(
                f"illegal transition {record.state.value} -> {new_state.value} for item {item_id}"
            )

    def _apply_transition(
        self, item_id: str, new_state: ItemState, provenance: str, iteration: int, timestamp: int
    ) -> None:
        record = self._items[item_id]
        self._state_index[record.state].discard(item_id)
        record.state = new_state
        record.state_history.append((new_state.value, timestamp, provenance))
        if new_state in POSITIVE_STATES or new_state in NEGATIVE_STATES:
            record.resolved_iteration = iteration
        elif new_state is ItemState.UNLABELED:
            record.resolved_iteration = None
        self._state_index[new_state].add(item_id)

    # -- queries ------------------------------------------------------------

    def get(self, item_id: str) -> ItemRecord:
        record = self._items.get(item_id)
        if record is None:
            raise NotFoundError(f"unknown item {item_id!r}")
        return record

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._items

    def __len__(self) -> int:
        return len(self._items)

    def count(self, state: ItemState) -> int:
        return len(self._state_index[state])

    def counts(self) -> dict[str, int]:
        with self._lock:
            return {state.value: len(ids) for state, ids in self._state_index.items()}

    def ids_in(self, state: ItemState) -> list[str]:
        with self._lock:
            return sorted(self._state_index[state])

    def categories(self) -> list[str]:
        with self._lock:
            return sorted({record.category for record in self._items.values()})

    def counts_for_category(self, category: str) -> dict[str, int]:
        with self._lock:
            counts = {state.value: 0 for state in ItemState}
            for record in self._items.values():
                if record.category == category:
                    counts[record.state.value] += 1
            return counts

    def sample_uniform(self, n: int, from_state: ItemState, seed: int) -> list[str]:
        """Sample n distinct item ids uniformly without replacement.

        Deterministic given the seed and the set of ids currently in
        ``from_state``.
        """
        if n < 0:
            raise InvalidArgumentError("sample size must be nonnegative")
        with self._lock:
            ids = sorted(self._state_index[from_state])
        if n > len(ids):
            raise InvalidArgumentError(
                f"requested {n} items from state {from_state.value} but only {len(ids)} available"
            )
        return random.Random(seed).sample(ids, n)

    # -- export -------------------------------------------------------------

    def export_lines(self) -> Iterator[str]:
        """Final labels as compact JSON lines, sorted by item id."""
        with self._lock:
            resolved = sorted(
                item_id
                for state in (POSITIVE_STATES | NEGATIVE_STATES)
                for item_id in self._state_index[state]
            )
            for item_id in resolved:
                record = self._items[item_id]
                yield json.dumps(
                    {
                        "id": record.id,
                        "final_label": "positive" if record.state in POSITIVE_STATES else "negative",
                        "source": "human" if record.state.value.startswith("human") else "auto",
                        "iteration": record.resolved_iteration,
                    },
                    separators=(",", ":"),
                )

    def export_to(self, path: str | Path) -> int:
        count = 0
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.export_lines():
                fh.write(line + "\n")
                count += 1
        return count

    # -- snapshot & replay ---------------------------------------------------

    def snapshot(self, path: str | Path) -> None:
        """Write the full store state plus the last applied journal seq."""
        with self._lock:
            seq = self.journal.seq if self.journal.seq else self.last_seq
            items = []
            for item_id in sorted(self._items):
                record = self._items[item_id]
                items.append(
                    {
                        "id": record.id,
                        "url": record.url,
                        "width": record.width,
                        "height": record.height,
                        "category": record.category,
                        "features": list(record.features) if record.features is not None else None,
                        "state": record.state.value,
                        "state_history": [list(entry) for entry in record.state_history],
                        "resolved_iteration": record.resolved_iteration,
                    }
                )
            blob = {
                "kind": "pool_snapshot",
                "seq": seq,
                "url_seen": sorted(self._url_seen),
                "category_dims": self._category_dims,
                "items": items,
            }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(blob, fh, separators=(",", ":"))

    @classmethod
    def from_snapshot(cls, path: str | Path) -> "PoolStore":
        with open(path, encoding="utf-8") as fh:
            blob = json.load(fh)
        if blob.get("kind") != "pool_snapshot":
            raise InvalidArgumentError(f"{path} is not a pool snapshot")
        store = cls(journal=NullJournal())
        store._url_seen = set(blob["url_seen"])
        store._category_dims = dict(blob["category_dims"])
        for payload in blob["items"]:
            record = ItemRecord(
                id=payload["id"],
                url=payload["url"],
                width=payload["width"],
                height=payload["height"],
                category=payload["category"],
                features=tuple(payload["features"]) if payload["features"] is not None else None,
                state=ItemState(payload["state"]),
                state_history=[tuple(entry) for entry in payload["state_history"]],
                resolved_iteration=payload["resolved_iteration"],
            )
            store._items[record.id] = record
            store._state_index[record.state].add(record.id)
        store.last_seq = int(blob["seq"])
        return store

    @classmethod
    def open(cls, journal_path: str | Path, clock: Clock | None = None) -> "PoolStore":
        """Open a live store over a journal file.

        Existing events are replayed to rebuild state; new mutations append
        after the last seq.
        """
        journal = Journal(journal_path)
        store = cls(journal=journal, clock=clock)
        if journal.seq:
            for event in read_events(journal.path):
                store._apply_event(event)
                store.last_seq = event.seq
        return store

    @classmethod
    def replay(cls, journal_path: str | Path, snapshot_path: str | Path | None = None) -> "PoolStore":
        """Rebuild a store from its journal, optionally starting at a snapshot.

        Service bookkeeping events interleaved in the journal are skipped;
        only pool mutations are applied. A corrupt line raises a
        JournalCorruptError carrying line number and byte offset.
        """
        if snapshot_path is not None:
            store = cls.from_snapshot(snapshot_path)
        else:
            store = cls(journal=NullJournal())
        for event in read_events(journal_path, after_seq=store.last_seq):
            store._apply_event(event)
            store.last_seq = event.seq
        return store

    def _apply_event(self, event: JournalEvent) -> None:
        if event.event_kind == EVENT_INGEST:
            payload = event.payload
            self._url_seen.add(payload["url"])
            self._apply_ingest(payload, event.timestamp)
        elif event.event_kind == EVENT_TRANSITION:
            payload = event.payload
            if payload["id"] not in self._items:
                raise JournalCorruptError(f"transition for unknown item {payload['id']}", 0, 0)
            self._apply_transition(
                payload["id"],
                ItemState(payload["state"]),
                payload["provenance"],
                payload["iteration"],
                event.timestamp,
            )
        elif event.event_kind == EVENT_BULK_TRANSITION:
            payload = event.payload
            state = ItemState(payload["state"])
            for item_id in payload["ids"]:
                self._apply_transition(
                    item_id, state, payload["provenance"], payload["iteration"], event.timestamp
                )
        # other event kinds belong to the service layer and carry no pool state

    # -- invariants -----------------------------------------------------------

    def check_invariants(self) -> None:
        """Full-scan structural checks; raises AssertionError on violation."""
        with self._lock:
            indexed = [item_id for ids in self._state_index.values() for item_id in ids]
            if len(indexed) != len(set(indexed)):
                raise AssertionError("item indexed under two lifecycle states")
            if set(indexed) != set(self._items):
                raise AssertionError("state index out of sync with item table")
            for record in self._items.values():
                if record.state.value != record.state_history[-1][0]:
                    raise AssertionError(f"state/history mismatch for {record.id}")
                for (prev, _, _), (nxt, _, _) in zip(record.state_history, record.state_history[1:]):
                    if ItemState(nxt) not in LEGAL_TRANSITIONS[ItemState(prev)]:
                        raise AssertionError(
                            f"illegal edge {prev} -> {nxt} in history of {record.id}"
                        )
