"""HIT assembly, gold-standard quality control, grading, consensus, reputation."""

from labelcascade.crowd.consensus import (
    ConsensusPolicy,
    CornerCandidate,
    LabelEvent,
    consensus,
    seed_corner_cases,
)
from labelcascade.crowd.gold import GoldItem, GoldPools, load_gold_file
from labelcascade.crowd.grading import (
    GradeResult,
    HitAssignment,
    SubmissionOutcome,
    grade_hidden,
    grade_online,
    record_submission,
)
from labelcascade.crowd.hits import (
    HIDDEN_COUNT,
    HIT_TOTAL,
    ONLINE_COUNT,
    TARGET_COUNT,
    TUTORIAL_COUNT,
    HitSpec,
    Slot,
    assemble_hit,
    redact_for_client,
)
from labelcascade.crowd.workers import WorkerProfile

__all__ = [
    "ConsensusPolicy",
    "CornerCandidate",
    "GoldItem",
    "GoldPools",
    "GradeResult",
    "HIDDEN_COUNT",
    "HIT_TOTAL",
    "HitAssignment",
    "HitSpec",
    "LabelEvent",
    "ONLINE_COUNT",
    "Slot",
    "SubmissionOutcome",
    "TARGET_COUNT",
    "TUTORIAL_COUNT",
    "WorkerProfile",
    "assemble_hit",
    "consensus",
    "grade_hidden",
    "grade_online",
    "load_gold_file",
    "record_submission",
    "redact_for_client",
    "seed_corner_cases",
]
