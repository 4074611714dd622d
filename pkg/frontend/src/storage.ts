// Draft persistence: answers are saved on every keystroke so a refresh
// within the session restores progress.

import type { Draft, DraftStore } from "./state.js";

const PREFIX = "labelcascade.draft.";

export class LocalDraftStore implements DraftStore {
  constructor(private storage: Storage) {}

  load(hitId: string): Draft | null {
    const raw = this.storage.getItem(PREFIX + hitId);
    if (!raw) return null;
    try {
      const parsed = JSON.parse(raw) as Draft;
      if (!Array.isArray(parsed.answers)) return null;
      return parsed;
    } catch {
      return null;
    }
  }

  save(hitId: string, draft: Draft): void {
    this.storage.setItem(PREFIX + hitId, JSON.stringify(draft));
  }

  clear(hitId: string): void {
    this.storage.removeItem(PREFIX + hitId);
  }
}

export class MemoryDraftStore implements DraftStore {
  private drafts = new Map<string, Draft>();

  load(hitId: string): Draft | null {
    return this.drafts.get(hitId) ?? null;
  }

  save(hitId: string, draft: Draft): void {
    this.drafts.set(hitId, { answers: [...draft.answers], cursor: draft.cursor });
  }

  clear(hitId: string): void {
    this.drafts.delete(hitId);
  }
}
