// Chronological prompt/image record with word-level diff highlighting of
// consecutive similar attempts. Inserted/removed words are bold (blue/
// red), weight changes colored only, reorders green, matching the glyph
// palette. Clicking a step copies its prompt into the creation panel.

import { clear, el } from "./dom";
import { ACTION_COLORS, BOLD_ACTIONS } from "./palette";
import type { DiffOp, EditAction, HistoryResponse, StepDoc } from "./types";

export interface HistoryHandlers {
  onUsePrompt?: (prompt: string) => void;
}

function normalizeWord(word: string): string {
  return word.toLowerCase().replace(/[.,]/g, "");
}

/** Map each display word of the prompt to the action affecting it. */
export function wordActions(
  prompt: string,
  ops: DiffOp[],
): Map<number, EditAction> {
  const words = prompt.split(/[\s,]+/).filter((w) => w.length > 0);
  const normalized = words.map((w) =>
    normalizeWord(w.replace(/[()[\]]/g, "").replace(/:[\d.]+$/, "")),
  );
  const actions = new Map<number, EditAction>();
  for (const op of ops) {
    if (op.action === "remove") continue; // removed words are not in this prompt
    const parts = op.word.split(" "); // phrase units cover several words
    for (const part of parts) {
      normalized.forEach((w, i) => {
        if (w === part && !actions.has(i)) actions.set(i, op.action);
      });
    }
  }
  return actions;
}

function renderPrompt(stepEl: HTMLElement, step: StepDoc, ops: DiffOp[] | null): void {
  const prompt = el("div", { class: "step-prompt" });
  const words = step.prompt.split(/[\s,]+/).filter((w) => w.length > 0);
  const actions = ops ? wordActions(step.prompt, ops) : new Map<number, EditAction>();
  words.forEach((word, i) => {
    const action = actions.get(i);
    const span = el("span", { class: "word" }, word);
    if (action) {
      span.classList.add(`word-${action}`);
      span.style.color = ACTION_COLORS[action];
      if (BOLD_ACTIONS.has(action)) span.style.fontWeight = "bold";
    }
    prompt.appendChild(span);
    prompt.appendChild(document.createTextNode(" "));
  });
  for (const op of ops ?? []) {
    if (op.action !== "remove") continue;
    const gone = el("span", { class: "word word-remove word-gone" }, op.word);
    gone.style.color = ACTION_COLORS.remove;
    gone.style.fontWeight = "bold";
    gone.style.textDecoration = "line-through";
    prompt.appendChild(gone);
    prompt.appendChild(document.createTextNode(" "));
  }
  stepEl.appendChild(prompt);
}

export function renderHistory(
  container: HTMLElement,
  history: HistoryResponse | null,
  handlers: HistoryHandlers = {},
): void {
  clear(container);
  if (!history || history.steps.length === 0) {
    container.appendChild(
      el("div", { class: "history-empty" }, "No steps recorded yet."),
    );
    return;
  }
  const opsForStep = new Map<string, DiffOp[] | null>();
  for (const t of history.transitions) opsForStep.set(t.tgt_step, t.ops);

  for (const step of history.steps) {
    const stepEl = el("div", {
      class: `step step-${step.status}`,
      "data-step": step.id,
      "data-status": step.status,
    });
    const head = el("div", { class: "step-head" });
    head.appendChild(el("span", { class: "step-order" }, `#${step.order}`));
    if (step.status === "failed")
      head.appendChild(el("span", { class: "step-failed-mark" }, "failed"));
    stepEl.appendChild(head);

    renderPrompt(stepEl, step, opsForStep.get(step.id) ?? null);

    const strip = el("div", { class: "step-images" });
    for (const url of step.image_urls) {
      const img = el("img", { src: url, class: "step-thumb", loading: "lazy" });
      strip.appendChild(img);
    }
    stepEl.appendChild(strip);

    stepEl.addEventListener("click", () => handlers.onUsePrompt?.(step.prompt));
    container.appendChild(stepEl);
  }
}
