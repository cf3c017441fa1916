// Navigation strip: one dot per prompt (sized by token count, shaded by
// temporal order), arcs between similar prompts with the strongest prior
// link emphasized, and clickable stage lines on the right. Clicking a
// line divides the stage there; clicking the gap between two lines joins
// them.

import { clear, svg } from "./dom";
import { orderShadeColor } from "./palette";
import type { MiniMap } from "./types";

export interface MinimapHandlers {
  onSplit?: (step: number) => void; // step becomes a stage start
  onMerge?: (boundary: number) => void; // boundary step joins the previous stage
}

const ROW_H = 26;
const DOT_X = 150;
const LINE_X = 184;

function dotRadius(tokenCount: number): number {
  return 3 + Math.min(9, Math.sqrt(tokenCount) * 1.6);
}

export function renderMinimap(
  container: HTMLElement,
  minimap: MiniMap | null,
  handlers: MinimapHandlers = {},
): void {
  clear(container);
  if (!minimap || minimap.dots.length === 0) {
    container.appendChild(
      Object.assign(document.createElement("div"), {
        className: "minimap-empty",
        textContent: "no steps",
      }),
    );
    return;
  }
  const n = minimap.dots.length;
  const height = (n + 1) * ROW_H;
  const root = svg("svg", {
    class: "minimap",
    viewBox: `0 0 220 ${height}`,
    width: "220",
    height: String(height),
  });

  const rowOf = new Map<string, number>();
  minimap.dots.forEach((dot, i) => rowOf.set(dot.step_id, i));
  const yOf = (i: number) => (i + 1) * ROW_H;

  for (const arc of minimap.arcs) {
    const a = rowOf.get(arc.src_step);
    const b = rowOf.get(arc.tgt_step);
    if (a === undefined || b === undefined) continue;
    const y0 = yOf(a);
    const y1 = yOf(b);
    const bulge = Math.min(70, 14 + (y1 - y0) * 0.35);
    const path = svg("path", {
      d: `M ${DOT_X} ${y0} C ${DOT_X - bulge} ${y0}, ${DOT_X - bulge} ${y1}, ${DOT_X} ${y1}`,
      class: `arc${arc.emphasized ? " arc-emphasized" : ""}`,
      fill: "none",
      stroke: arc.emphasized ? "#4a5a72" : "#b9c3d1",
      "stroke-width": arc.emphasized ? "2.4" : "1.2",
      "data-similarity": arc.similarity.toFixed(3),
      "data-emphasized": String(arc.emphasized),
    });
    root.appendChild(path);
  }

  minimap.dots.forEach((dot, i) => {
    root.appendChild(
      svg("circle", {
        cx: String(DOT_X),
        cy: String(yOf(i)),
        r: String(dotRadius(dot.token_count)),
        fill: orderShadeColor(dot.order_shade),
        class: "dot",
        "data-step": dot.step_id,
        "data-tokens": String(dot.token_count),
      }),
    );
  });

  // stage segments: between consecutive dots, a solid segment when both
  // steps share a stage (click = split there), a gap marker otherwise
  // (click = merge the boundary)
  const stageOf = new Map<number, number>();
  minimap.stage_lines.forEach(([start, end], idx) => {
    for (let s = start; s <= end; s += 1) stageOf.set(s, idx);
  });
  for (let step = 1; step <= n; step += 1) {
    root.appendChild(
      svg("line", {
        x1: String(LINE_X),
        y1: String(yOf(step - 1) - 8),
        x2: String(LINE_X),
        y2: String(yOf(step - 1) + 8),
        class: "stage-tick",
        stroke: "#5b6b82",
        "stroke-width": "3",
      }),
    );
  }
  for (let step = 1; step < n; step += 1) {
    const sameStage = stageOf.get(step) === stageOf.get(step + 1);
    const y0 = yOf(step - 1) + 8;
    const y1 = yOf(step) - 8;
    const seg = svg("line", {
      x1: String(LINE_X),
      y1: String(y0),
      x2: String(LINE_X),
      y2: String(y1),
      class: sameStage ? "stage-seg stage-line" : "stage-seg stage-gap",
      "data-boundary": String(step + 1),
      stroke: sameStage ? "#5b6b82" : "#d4dbe4",
      "stroke-width": "3",
      "pointer-events": "all",
    });
    if (!sameStage) seg.setAttribute("stroke-dasharray", "2,4");
    seg.addEventListener("click", () => {
      if (sameStage) handlers.onSplit?.(step + 1);
      else handlers.onMerge?.(step + 1);
    });
    root.appendChild(seg);
  }

  container.appendChild(root);
}
