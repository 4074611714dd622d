"""Search-query plan generation.

A plan crosses every query string (bare category name plus one string per
adjective) with consecutive date spans tiling the requested range. Spans
are ``span_days`` long except the last, which truncates at the range end so
the tiling covers the range exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

from labelcascade.errors import InvalidArgumentError
from labelcascade.pool.types import CategorySpec


@dataclass(frozen=True)
class QuerySpan:
    query: str
    span_start: date
    span_end: date


@dataclass(frozen=True)
class QueryPlan:
    category: str
    queries: tuple[QuerySpan, ...]

    def __len__(self) -> int:
        return len(self.queries)


def _tile_spans(range_start: date, range_end: date, span_days: int) -> list[tuple[date, date]]:
    spans = []
    cursor = range_start
    step = timedelta(days=span_days)
    one_day = timedelta(days=1)
    while cursor <= range_end:
        end = min(cursor + step - one_day, range_end)
        spans.append((cursor, end))
        cursor = end + one_day
    return spans


def generate_query_plan(
    category: CategorySpec,
    range_start: date,
    range_end: date,
    span_days: int = 3,
) -> QueryPlan:
    """Build the (adjective x date-span) query grid for one category.

    The date range is inclusive of both endpoints, so a range of exactly
    ``span_days`` days yields a single span.
    """
    if range_start >= range_end:
        raise InvalidArgumentError(f"empty date range: {range_start}..{range_end}")
    if span_days < 1:
        raise InvalidArgumentError(f"span_days must be >= 1, got {span_days}")

    names = [category.name] + [f"{adj} {category.name}" for adj in category.adjectives]
    spans = _tile_spans(range_start, range_end, span_days)
    queries = tuple(
        QuerySpan(query=name, span_start=start, span_end=end)
        for name in names
        for start, end in spans
    )
    return QueryPlan(category=category.name, queries=queries)
