// Labeling session state machine. Pure: no DOM, no network. The view layer
// renders snapshots of this and feeds it key events; tests drive it directly.

import type { Answer, HitPayload, Slot } from "./types.js";

export const ONLINE_PASS_MIN = 18; // of 20, the client-side gate
const ONLINE_CHECK_COUNT = 20;

export interface Draft {
  answers: Answer[];
  cursor: number;
}

export interface DraftStore {
  load(hitId: string): Draft | null;
  save(hitId: string, draft: Draft): void;
  clear(hitId: string): void;
}

export type Phase = "instructions" | "labeling" | "submitted";

export interface TutorialModal {
  slot: Slot;
  explanation: string;
}

export class LabelingSession {
  readonly payload: HitPayload;
  answers: Answer[];
  /** 1-based slot cursor, matching slot positions. */
  cursor = 1;
  fullscreen = false;
  phase: Phase = "instructions";
  modal: TutorialModal | null = null;
  /** Number of times the tutorial gate fired (one per wrong advance). */
  gateFirings = 0;
  submitBlockedReason: string | null = null;

  private store: DraftStore | null;

  constructor(payload: HitPayload, store: DraftStore | null = null) {
    if (payload.slots.length !== payload.slot_count) {
      throw new Error(`payload carries ${payload.slots.length} slots, expected ${payload.slot_count}`);
    }
    this.payload = payload;
    // every answer defaults to "no"; only explicit toggles change that
    this.answers = new Array<Answer>(payload.slot_count).fill("no");
    this.store = store;
    const draft = store?.load(payload.hit_id);
    if (draft && draft.answers.length === payload.slot_count) {
      this.answers = [...draft.answers];
      this.cursor = Math.min(Math.max(draft.cursor, 1), payload.slot_count);
      this.phase = "labeling";
    }
  }

  get slot(): Slot {
    const slot = this.payload.slots[this.cursor - 1];
    if (!slot) throw new Error(`cursor ${this.cursor} out of bounds`);
    return slot;
  }

  get currentAnswer(): Answer {
    return this.answers[this.cursor - 1] ?? "no";
  }

  get atEnd(): boolean {
    return this.cursor === this.payload.slot_count;
  }

  /** Thumbnails: up to three slots either side of the cursor. */
  thumbnails(): { before: Slot[]; after: Slot[] } {
    const index = this.cursor - 1;
    return {
      before: this.payload.slots.slice(Math.max(0, index - 3), index),
      after: this.payload.slots.slice(index + 1, index + 4),
    };
  }

  beginLabeling(): void {
    if (this.phase === "instructions") this.phase = "labeling";
  }

  toggleFullscreen(): void {
    this.fullscreen = !this.fullscreen;
  }

  toggle(): void {
    if (this.phase !== "labeling") return;
    this.answers[this.cursor - 1] = this.currentAnswer === "yes" ? "no" : "yes";
    // a corrected tutorial answer releases the gate
    if (this.modal && this.currentAnswer === this.slot.truth) {
      this.modal = null;
    }
    this.persist();
  }

  /** Move the cursor; clamped at both ends; gated on tutorial mistakes. */
  navigate(direction: 1 | -1): void {
    if (this.phase !== "labeling") return;
    if (this.modal) return; // navigation disabled until the label is fixed
    if (direction === 1 && this.isWrongTutorialAnswer()) {
      this.modal = { slot: this.slot, explanation: this.slot.explanation ?? "" };
      this.gateFirings += 1;
      return;
    }
    this.cursor = Math.min(Math.max(this.cursor + direction, 1), this.payload.slot_count);
    this.persist();
  }

  private isWrongTutorialAnswer(): boolean {
    const slot = this.slot;
    return slot.kind === "tutorial" && slot.truth !== undefined && this.currentAnswer !== slot.truth;
  }

  /** Client-side online check: correct answers among the online slots. */
  onlineScore(): { correct: number; total: number } {
    let correct = 0;
    let total = 0;
    for (const slot of this.payload.slots) {
      if (slot.kind !== "online" || slot.truth === undefined) continue;
      total += 1;
      if (this.answers[slot.position - 1] === slot.truth) correct += 1;
    }
    return { correct, total };
  }

  /**
   * Gate before any POST: the worker must have reached the end and cleared
   * the online bar. Returns the answers in slot order when submission may
   * proceed, null otherwise (with submitBlockedReason set).
   */
  submissionPayload(): Answer[] | null {
    if (!this.atEnd) {
      this.submitBlockedReason = "Label every image before submitting.";
      return null;
    }
    const { correct } = this.onlineScore();
    if (correct < ONLINE_PASS_MIN) {
      this.submitBlockedReason =
        `Quality check: ${correct}/${ONLINE_CHECK_COUNT} consistency images correct, ` +
        `${ONLINE_PASS_MIN} required. Please revise your answers.`;
      return null;
    }
    this.submitBlockedReason = null;
    return [...this.answers];
  }

  markSubmitted(): void {
    this.phase = "submitted";
    this.store?.clear(this.payload.hit_id);
  }

  private persist(): void {
    this.store?.save(this.payload.hit_id, { answers: [...this.answers], cursor: this.cursor });
  }
}

/** Colorblind-safe answer colors (Okabe-Ito blue / vermillion). */
export const ANSWER_COLORS: Record<Answer, string> = {
  yes: "#0072B2",
  no: "#D55E00",
};
