// DOM rendering for the labeling session. One render() call redraws the
// whole interface from the state snapshot; handlers mutate state and
// re-render.

import { ANSWER_COLORS, LabelingSession } from "./state.js";
import type { Slot } from "./types.js";

export interface ViewCallbacks {
  onSubmit(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function thumbnail(slot: Slot): HTMLElement {
  const img = el("img", "thumb");
  img.src = slot.url;
  img.alt = `image ${slot.position}`;
  return img;
}

export class LabelingView {
  private root: HTMLElement;
  private session: LabelingSession;
  private callbacks: ViewCallbacks;
  statusLine = "";

  constructor(root: HTMLElement, session: LabelingSession, callbacks: ViewCallbacks) {
    this.root = root;
    this.session = session;
    this.callbacks = callbacks;
  }

  render(): void {
    this.root.replaceChildren();
    if (this.session.phase === "instructions") {
      this.renderInstructions();
    } else if (this.session.phase === "labeling") {
      this.renderLabeling();
    } else {
      this.renderDone();
    }
  }

  private renderInstructions(): void {
    const page = el("div", "instructions-page");
    const info = this.session.payload.instructions;
    page.append(el("h1", "title", `Is this a ${info?.category ?? this.session.payload.category}?`));
    if (info?.definition) {
      page.append(el("p", "definition", info.definition));
    }
    const examples = el("div", "examples");
    for (const example of info?.examples ?? []) {
      const card = el("figure", `example example-${example.truth}`);
      const img = el("img");
      img.src = example.url;
      card.append(img);
      card.append(
        el("figcaption", "example-caption", `${example.truth.toUpperCase()}: ${example.explanation}`),
      );
      examples.append(card);
    }
    page.append(examples);
    const start = el("button", "start-button", "Start labeling");
    start.addEventListener("click", () => {
      this.session.beginLabeling();
      this.render();
    });
    page.append(start);
    this.root.append(page);
  }

  private renderLabeling(): void {
    const session = this.session;
    const container = el("div", "labeling");

    const header = el("div", "header");
    const info = session.payload.instructions;
    header.append(
      el("span", "question", `Is this a ${info?.category ?? session.payload.category}? (space toggles)`),
    );
    header.append(
      el("span", "progress", `${session.cursor} / ${session.payload.slot_count}`),
    );
    const fullscreenButton = el("button", "fullscreen-button", "Fullscreen");
    fullscreenButton.addEventListener("click", () => {
      session.toggleFullscreen();
      void applyFullscreen(this.root, session.fullscreen);
      this.render();
    });
    header.append(fullscreenButton);
    container.append(header);

    const strip = el("div", "thumb-strip");
    const { before, after } = session.thumbnails();
    for (const slot of before) strip.append(thumbnail(slot));
    const gap = el("span", "thumb-current", "●");
    strip.append(gap);
    for (const slot of after) strip.append(thumbnail(slot));
    container.append(strip);

    const frame = el("div", "image-frame");
    frame.style.borderColor = ANSWER_COLORS[session.currentAnswer];
    frame.style.borderWidth = "6px";
    frame.style.borderStyle = "solid";
    const image = el("img", "main-image");
    image.src = session.slot.url;
    image.alt = `slot ${session.cursor}`;
    frame.append(image);
    container.append(frame);

    const answer = el("div", "answer-line", `Answer: ${session.currentAnswer.toUpperCase()}`);
    answer.style.color = ANSWER_COLORS[session.currentAnswer];
    container.append(answer);

    if (session.atEnd) {
      const submit = el("button", "submit-button", "Submit");
      submit.addEventListener("click", () => this.callbacks.onSubmit());
      container.append(submit);
    }
    if (session.submitBlockedReason) {
      container.append(el("div", "submit-blocked", session.submitBlockedReason));
    }
    if (this.statusLine) {
      container.append(el("div", "status-line", this.statusLine));
    }

    if (session.modal) {
      const overlay = el("div", "tutorial-modal-overlay");
      const modal = el("div", "tutorial-modal");
      modal.append(el("h2", undefined, "Please check this one again"));
      modal.append(el("p", "tutorial-explanation", session.modal.explanation));
      modal.append(el("p", undefined, "Press space to fix the answer."));
      overlay.append(modal);
      container.append(overlay);
    }

    this.root.append(container);
  }

  private renderDone(): void {
    const page = el("div", "done-page");
    page.append(el("h1", undefined, "Submitted"));
    if (this.statusLine) page.append(el("p", "status-line", this.statusLine));
    this.root.append(page);
  }
}

async function applyFullscreen(root: HTMLElement, on: boolean): Promise<void> {
  // jsdom and older browsers lack the fullscreen API; state still tracks it
  try {
    if (on && root.requestFullscreen) {
      await root.requestFullscreen();
    } else if (!on && document.exitFullscreen && document.fullscreenElement) {
      await document.exitFullscreen();
    }
  } catch {
    // non-fatal: the layout still maximizes via CSS
  }
}

export function bindKeyboard(
  target: Pick<Document, "addEventListener">,
  session: LabelingSession,
  rerender: () => void,
): void {
  target.addEventListener("keydown", (event: Event) => {
    const key = (event as KeyboardEvent).key;
    if (key === "ArrowRight") {
      session.navigate(1);
    } else if (key === "ArrowLeft") {
      session.navigate(-1);
    } else if (key === " " || key === "Spacebar") {
      (event as KeyboardEvent).preventDefault?.();
      session.toggle();
    } else {
      return;
    }
    rerender();
  });
}
