// Thin fetch client for the task service.

import type { Answer, ApiErrorBody, HitPayload, SessionInfo, SubmitResult } from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly retryable: boolean;
  readonly status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.retryable = body.retryable;
    this.status = status;
  }
}

async function post<T>(base: string, path: string, body: unknown): Promise<T> {
  const response = await fetch(`${base}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  const parsed = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, parsed as ApiErrorBody);
  }
  return parsed as T;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  createSession(workerId: string): Promise<SessionInfo> {
    return post<SessionInfo>(this.base, "/api/sessions", { worker_id: workerId });
  }

  nextHit(token: string, category: string): Promise<HitPayload> {
    return post<HitPayload>(this.base, "/api/hits/next", { token, category });
  }

  submitHit(token: string, hitId: string, answers: Answer[]): Promise<SubmitResult> {
    return post<SubmitResult>(this.base, `/api/hits/${encodeURIComponent(hitId)}/submit`, {
      token,
      answers,
    });
  }

  async metrics(category: string): Promise<unknown> {
    const response = await fetch(`${this.base}/api/admin/metrics/${encodeURIComponent(category)}`);
    const parsed = await response.json();
    if (!response.ok) throw new ApiError(response.status, parsed as ApiErrorBody);
    return parsed;
  }
}
