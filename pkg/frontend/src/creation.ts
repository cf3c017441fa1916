// Creation panel: prompt box, batch size, seed, and the generate button.
// Generation is queued server-side; the panel reports job progress.

import { el } from "./dom";

export interface CreationHandlers {
  onGenerate: (prompt: string, n: number, seed: number) => void;
}

export interface CreationPanel {
  setPrompt(prompt: string): void;
  setStatus(text: string, kind?: "idle" | "busy" | "error"): void;
}

export function renderCreation(
  container: HTMLElement,
  handlers: CreationHandlers,
): CreationPanel {
  container.textContent = "";
  const prompt = el("textarea", {
    id: "prompt-input",
    rows: "4",
    placeholder: "describe the image...",
  }) as HTMLTextAreaElement;
  const n = el("input", { id: "batch-input", type: "number", min: "1", max: "8", value: "2" });
  const seed = el("input", { id: "seed-input", type: "number", value: "1" });
  const button = el("button", { id: "generate-btn" }, "Generate");
  const status = el("div", { id: "generate-status", class: "status-idle" }, "");

  const nRow = el("div", { class: "creation-row" });
  nRow.appendChild(el("span", {}, "batch"));
  nRow.appendChild(n);
  nRow.appendChild(el("span", {}, "seed"));
  nRow.appendChild(seed);

  button.addEventListener("click", () => {
    const text = prompt.value.trim();
    if (!text) return;
    handlers.onGenerate(
      text,
      Number((n as HTMLInputElement).value),
      Number((seed as HTMLInputElement).value),
    );
  });

  container.appendChild(prompt);
  container.appendChild(nRow);
  container.appendChild(button);
  container.appendChild(status);

  return {
    setPrompt(value: string) {
      prompt.value = value;
    },
    setStatus(text: string, kind: "idle" | "busy" | "error" = "idle") {
      status.textContent = text;
      status.className = `status-${kind}`;
    },
  };
}
