// Wire types for the labeling service API.

export type Answer = "yes" | "no";

export type SlotKind = "tutorial" | "online" | "target";

export interface Slot {
  position: number; // 1-based
  item_id: string;
  url: string;
  kind: SlotKind;
  // tutorial slots carry both; online slots carry truth only; target-looking
  // slots (including the server's hidden checks) carry neither
  truth?: Answer;
  explanation?: string;
}

export interface Instructions {
  category: string;
  kind: string;
  definition: string;
  examples: { url: string; truth: Answer; explanation: string }[];
}

export interface HitPayload {
  hit_id: string;
  category: string;
  slot_count: number;
  slots: Slot[];
  instructions?: Instructions;
  assignment_expires_at?: string;
}

export interface SessionInfo {
  token: string;
  worker_id: string;
  issued_at: string;
  expires_at: string;
}

export interface SubmitAccepted {
  status: "accepted";
  label_events: number;
  hit_id: string;
}

export interface SubmitRejected {
  status: "rejected";
  reason: string;
  resubmit_allowed: boolean;
  online_correct?: number;
  online_required?: number;
  wrong_online_positions?: number[];
}

export type SubmitResult = SubmitAccepted | SubmitRejected;

export interface ApiErrorBody {
  code: string;
  message: string;
  retryable: boolean;
}
