"""Append-only event journal.

One JSON object per line: {"seq", "timestamp", "event_kind", "payload"}.
Sequence numbers increase strictly from 1 and are assigned by the writer;
they cover every event kind in the deployment (pool mutations and service
bookkeeping share the same log).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from labelcascade.errors import JournalCorruptError


@dataclass(frozen=True)
class JournalEvent:
    seq: int
    timestamp: int
    event_kind: str
    payload: dict


def encode_event(event: JournalEvent) -> str:
    return json.dumps(
        {
            "seq": event.seq,
            "timestamp": event.timestamp,
            "event_kind": event.event_kind,
            "payload": event.payload,
        },
        separators=(",", ":"),
    )


class Journal:
    """Writer handle over a journal file.

    Append-only. Flushing per event is the durable default for live
    serving; bulk producers (simulations) may defer flushing to close.
    """

    def __init__(self, path: str | Path, flush_each: bool = True):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._seq = last_seq(self.path) if self.path.exists() else 0
        self._fh = open(self.path, "a", encoding="utf-8")
        self._flush_each = flush_each

    @property
    def seq(self) -> int:
        return self._seq

    def append(self, event_kind: str, payload: dict, timestamp: int) -> JournalEvent:
        self._seq += 1
        event = JournalEvent(self._seq, int(timestamp), event_kind, payload)
        self._fh.write(encode_event(event) + "\n")
        if self._flush_each:
            self._fh.flush()
        return event

    def flush(self) -> None:
        self._fh.flush()

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "Journal":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class NullJournal:
    """Sink for stores that do not persist (unit tests, scratch pools)."""

    path = None
    seq = 0

    def append(self, event_kind: str, payload: dict, timestamp: int) -> None:
        return None

    def close(self) -> None:
        return None


def read_events(path: str | Path, after_seq: int = 0) -> Iterator[JournalEvent]:
    """Yield journal events with seq > after_seq.

    Any unparseable or out-of-order line halts iteration with a
    JournalCorruptError naming the line and byte offset.
    """
    expected = None
    offset = 0
    with open(path, "rb") as fh:
        for line_number, raw in enumerate(fh, start=1):
            line_offset = offset
            offset += len(raw)
            stripped = raw.strip()
            if not stripped:
                continue
            try:
                record = json.loads(stripped.decode("utf-8"))
                seq = record["seq"]
                event = JournalEvent(
                    seq=int(seq),
                    timestamp=int(record["timestamp"]),
                    event_kind=str(record["event_kind"]),
                    payload=record["payload"],
                )
            except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
                raise JournalCorruptError(f"unreadable journal line: {exc}", line_number, line_offset)
            if expected is None:
                expected = 1
            if event.seq != expected:
                raise JournalCorruptError(
                    f"sequence gap: expected seq {expected}, found {event.seq}",
                    line_number,
                    line_offset,
                )
            expected = event.seq + 1
            if event.seq > after_seq:
                yield event


def last_seq(path: str | Path) -> int:
    """Highest seq present in a journal file, 0 if empty."""
    seq = 0
    if not os.path.exists(path):
        return 0
    for event in read_events(path):
        seq = event.seq
    return seq
