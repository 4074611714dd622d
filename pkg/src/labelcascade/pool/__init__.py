"""Candidate-item store: query planning, manifest ingest, lifecycle state, journal."""

from labelcascade.pool.plan import QueryPlan, QuerySpan, generate_query_plan
from labelcascade.pool.store import PoolStore
from labelcascade.pool.types import (
    LEGAL_TRANSITIONS,
    TERMINAL_STATES,
    CategorySpec,
    IngestReport,
    ItemRecord,
    ItemState,
)

__all__ = [
    "CategorySpec",
    "IngestReport",
    "ItemRecord",
    "ItemState",
    "LEGAL_TRANSITIONS",
    "TERMINAL_STATES",
    "PoolStore",
    "QueryPlan",
    "QuerySpan",
    "generate_query_plan",
]
