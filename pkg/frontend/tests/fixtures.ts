// Synthetic payload builders for unit tests.

import type { Answer, HitPayload, Slot } from "../src/types.js";

export interface FixtureSpec {
  tutorials?: { truth: Answer; explanation: string }[];
  online?: Answer[];
  targets?: number;
}

export function buildPayload(spec: FixtureSpec = {}): HitPayload {
  const tutorials = spec.tutorials ?? [];
  const online = spec.online ?? [];
  const targets = spec.targets ?? 3;
  const slots: Slot[] = [];
  let position = 1;
  for (const tutorial of tutorials) {
    slots.push({
      position: position++,
      item_id: `t-${position}`,
      url: `https://img.test/t${position}.jpg`,
      kind: "tutorial",
      truth: tutorial.truth,
      explanation: tutorial.explanation,
    });
  }
  for (const truth of online) {
    slots.push({
      position: position++,
      item_id: `o-${position}`,
      url: `https://img.test/o${position}.jpg`,
      kind: "online",
      truth,
    });
  }
  for (let index = 0; index < targets; index++) {
    slots.push({
      position: position++,
      item_id: `x-${position}`,
      url: `https://img.test/x${position}.jpg`,
      kind: "target",
    });
  }
  return {
    hit_id: "hit-test",
    category: "kitchen",
    slot_count: slots.length,
    slots,
    instructions: {
      category: "kitchen",
      kind: "scene",
      definition: "A room where food is cooked.",
      examples: [
        { url: "https://img.test/e1.jpg", truth: "yes", explanation: "clearly a kitchen" },
      ],
    },
  };
}

/** A payload shaped like the real thing: 15 tutorial, 20 online, 170 target-looking. */
export function fullPayload(onlineTruth: Answer = "yes"): HitPayload {
  return buildPayload({
    tutorials: Array.from({ length: 15 }, (_, i) => ({
      truth: i % 2 === 0 ? "yes" : "no",
      explanation: `tutorial ${i}`,
    })),
    online: Array.from({ length: 20 }, () => onlineTruth),
    targets: 170,
  });
}
