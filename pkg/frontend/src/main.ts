// Bootstrap: fetch a HIT, wire state to the DOM, own the submit flow.

import { ApiClient, ApiError } from "./api.js";
import { LabelingSession } from "./state.js";
import { LocalDraftStore } from "./storage.js";
import { bindKeyboard, LabelingView } from "./view.js";

function workerId(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("worker") ?? `anon-${Math.random().toString(36).slice(2, 10)}`;
}

function category(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("category") ?? "kitchen";
}

export async function boot(root: HTMLElement): Promise<void> {
  const api = new ApiClient("");
  const drafts = new LocalDraftStore(window.localStorage);

  let token: string;
  try {
    token = (await api.createSession(workerId())).token;
  } catch (error) {
    root.textContent =
      error instanceof ApiError && error.code === "worker_blocked"
        ? "This account is blocked."
        : "Could not start a session. Try again later.";
    return;
  }

  let payload;
  try {
    payload = await api.nextHit(token, category());
  } catch (error) {
    root.textContent =
      error instanceof ApiError && error.code === "no_work"
        ? "No work available right now."
        : "Could not fetch a task. Try again later.";
    return;
  }

  const session = new LabelingSession(payload, drafts);
  const view = new LabelingView(root, session, {
    onSubmit: () => void submit(),
  });

  async function submit(): Promise<void> {
    const answers = session.submissionPayload();
    if (answers === null) {
      view.render(); // shows the revise prompt
      return;
    }
    try {
      const result = await api.submitHit(token, session.payload.hit_id, answers);
      if (result.status === "accepted") {
        view.statusLine = "Thank you! Your labels were recorded.";
        session.markSubmitted();
      } else if (result.reason === "online_check_failed") {
        // server re-checks what the client already gates on; show the prompt
        view.statusLine = "Consistency check failed. Please revise and resubmit.";
      } else {
        // quality_check_failed and anything else: no per-item detail exists
        view.statusLine = "Submission did not pass quality review.";
        session.markSubmitted();
      }
    } catch (error) {
      if (error instanceof ApiError && !error.retryable) {
        view.statusLine = `Submission failed (${error.code}).`;
      } else {
        // network trouble: answers stay saved locally, invite a retry
        view.statusLine = "Network problem; your answers are saved. Try submitting again.";
      }
    }
    view.render();
  }

  bindKeyboard(document, session, () => view.render());
  view.render();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot(document.getElementById("app") as HTMLElement);
}
