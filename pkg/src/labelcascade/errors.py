"""Exception taxonomy shared across the package.

Every error carries a stable machine code so the service layer can map it
onto wire responses without string matching.
"""

from __future__ import annotations


class LabelCascadeError(Exception):
    """Base class for all package errors."""

    code = "internal"
    retryable = False


class InvalidArgumentError(LabelCascadeError):
    code = "invalid_argument"


class NotFoundError(LabelCascadeError):
    code = "not_found"


class StateConflictError(LabelCascadeError):
    """An item lifecycle transition that the state machine forbids."""

    code = "state_conflict"


class DegenerateDataError(LabelCascadeError):
    """Training or metric input lacking both classes."""

    code = "degenerate_data"


class PoolExhaustedError(LabelCascadeError):
    """A gold pool cannot supply enough items for a HIT role."""

    code = "pool_exhausted"

    def __init__(self, role: str, needed: int, available: int):
        super().__init__(f"gold pool for role {role!r} has {available} eligible items, need {needed}")
        self.role = role
        self.needed = needed
        self.available = available


class DuplicateSubmissionError(LabelCascadeError):
    code = "duplicate_submission"


class UndefinedRatioError(LabelCascadeError):
    """Amplification requested before any human label exists."""

    code = "undefined_ratio"


class NoWorkError(LabelCascadeError):
    code = "no_work"
    retryable = True


class WorkerBlockedError(LabelCascadeError):
    code = "worker_blocked"


class SessionExpiredError(LabelCascadeError):
    code = "session_expired"
    retryable = True


class MalformedSubmissionError(LabelCascadeError):
    code = "malformed_submission"


class JournalCorruptError(LabelCascadeError):
    """Raised when replay hits an unreadable journal line."""

    code = "journal_corrupt"

    def __init__(self, message: str, line_number: int, offset: int):
        super().__init__(f"{message} (line {line_number}, byte offset {offset})")
        self.line_number = line_number
        self.offset = offset
