"""HTTP surface over the labeling service.

JSON over HTTP; every error response carries {code, message, retryable} so
clients can branch on stable codes instead of prose.
"""

from __future__ import annotations

import logging
import random

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from labelcascade.errors import (
    DuplicateSubmissionError,
    InvalidArgumentError,
    LabelCascadeError,
    MalformedSubmissionError,
    NoWorkError,
    NotFoundError,
    SessionExpiredError,
    StateConflictError,
    WorkerBlockedError,
)
from labelcascade.pool.types import ItemState
from labelcascade.svc.service import LabelingService

logger = logging.getLogger(__name__)

_STATUS_BY_ERROR = {
    InvalidArgumentError: 400,
    MalformedSubmissionError: 400,
    SessionExpiredError: 401,
    WorkerBlockedError: 403,
    NotFoundError: 404,
    NoWorkError: 404,
    DuplicateSubmissionError: 409,
    StateConflictError: 409,
}


class SessionRequest(BaseModel):
    worker_id: str = Field(min_length=1)


class NextHitRequest(BaseModel):
    token: str
    category: str


class SubmitRequest(BaseModel):
    token: str
    answers: list[str]


class EnqueueRequest(BaseModel):
    category: str
    count: int = Field(gt=0)
    iteration: int = 0


def create_app(service: LabelingService) -> FastAPI:
    app = FastAPI(title="labelcascade", docs_url=None, redoc_url=None)

    @app.exception_handler(LabelCascadeError)
    async def handle_domain_error(request: Request, exc: LabelCascadeError) -> JSONResponse:
        status = 500
        for klass, code in _STATUS_BY_ERROR.items():
            if isinstance(exc, klass):
                status = code
                break
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "message": str(exc), "retryable": exc.retryable},
        )

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"ok": True, "items": len(service.store)}

    @app.post("/api/sessions")
    async def create_session(body: SessionRequest) -> dict:
        return service.create_session(body.worker_id)

    @app.post("/api/hits/next")
    async def next_hit(body: NextHitRequest) -> dict:
        return service.next_hit(body.token, body.category)

    @app.post("/api/hits/{hit_id}/submit")
    async def submit_hit(hit_id: str, body: SubmitRequest) -> dict:
        return service.submit_hit(body.token, hit_id, body.answers)

    @app.get("/api/admin/metrics/{category}")
    async def metrics(category: str) -> dict:
        return service.metrics(category)

    @app.post("/api/admin/enqueue")
    async def enqueue(body: EnqueueRequest) -> dict:
        """Queue unlabeled items for labeling without running the cascade.

        Operator convenience for label-only deployments and contract tests.
        """
        service.category_state(body.category)
        eligible = [
            item_id
            for item_id in service.store.ids_in(ItemState.UNLABELED)
            if service.store.get(item_id).category == body.category
        ]
        if not eligible:
            raise NoWorkError(f"no unlabeled items in {body.category!r}")
        count = min(body.count, len(eligible))
        ids = random.Random(service.config.seed + len(eligible)).sample(eligible, count)
        queued = service.enqueue_targets(body.category, ids, body.iteration)
        return {"queued": queued, "category": body.category}

    return app
