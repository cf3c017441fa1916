// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from "vitest";

import { renderControls } from "../src/controls";
import { renderHistory, wordActions } from "../src/history";
import { renderGraph } from "../src/graphview";
import { renderMinimap } from "../src/minimap";
import { defaultState } from "../src/state";
import { smallDocument, smallHistory } from "./fixtures";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = ""; // duplicate ids across tests break scoped queries
  container = document.createElement("div");
  document.body.appendChild(container);
});

describe("graph view", () => {
  it("renders one node element per document node", () => {
    const doc = smallDocument();
    renderGraph(container, doc, true);
    expect(container.querySelectorAll("[data-node]").length).toBe(doc.nodes.length);
  });

  it("thumbnails get images with the engine asset url, rects get shaded boxes", () => {
    renderGraph(container, smallDocument(), true);
    const thumb = container.querySelector('[data-node="img-a"] image');
    expect(thumb?.getAttribute("href")).toBe("/api/v1/sessions/s/assets/img-a.png");
    expect(container.querySelector('[data-node="img-c"] rect.node-rect')).toBeTruthy();
  });

  it("draws edges only for visible bundles", () => {
    renderGraph(container, smallDocument(), true);
    const bundleIds = new Set(
      Array.from(container.querySelectorAll(".edge")).map((e) =>
        e.getAttribute("data-bundle"),
      ),
    );
    expect(bundleIds.has("0")).toBe(true);
    expect(bundleIds.has("1")).toBe(false);
  });

  it("swaps filled bubbles on grouping change without a new document", () => {
    const doc = smallDocument();
    renderGraph(container, doc, true, {}, null, "cluster");
    const clusterKinds = Array.from(container.querySelectorAll(".bubble")).map((b) =>
      b.getAttribute("data-kind"),
    );
    expect(clusterKinds.filter((k) => k === "cluster").length).toBe(2);
    expect(clusterKinds.filter((k) => k === "stage").length).toBe(0);
    expect(clusterKinds.filter((k) => k === "same_prompt").length).toBe(1);

    renderGraph(container, doc, true, {}, null, "stage");
    const stageKinds = Array.from(container.querySelectorAll(".bubble")).map((b) =>
      b.getAttribute("data-kind"),
    );
    expect(stageKinds.filter((k) => k === "stage").length).toBe(2);
    expect(stageKinds.filter((k) => k === "cluster").length).toBe(0);
    expect(stageKinds.filter((k) => k === "same_prompt").length).toBe(1);
  });

  it("empty session shows a hint", () => {
    const doc = smallDocument();
    doc.nodes = [];
    renderGraph(container, doc, true);
    expect(container.querySelector(".graph-empty-hint")).toBeTruthy();
  });

  it("toggle hides the graph without touching the document", () => {
    renderGraph(container, smallDocument(), false);
    expect(container.querySelector("svg.graph-canvas")).toBeNull();
    expect(container.querySelector(".graph-hidden-hint")).toBeTruthy();
  });

  it("node clicks reach the handler", () => {
    const onNodeClick = vi.fn();
    renderGraph(container, smallDocument(), true, { onNodeClick });
    (container.querySelector('[data-node="img-b"]') as SVGElement).dispatchEvent(
      new MouseEvent("click", { bubbles: true }),
    );
    expect(onNodeClick).toHaveBeenCalledOnce();
    expect(onNodeClick.mock.calls[0][0].image_id).toBe("img-b");
  });

  it("glyph carries its label words", () => {
    renderGraph(container, smallDocument(), true);
    expect(container.querySelector(".glyph-label")?.textContent).toBe("+white");
  });
});

describe("history view", () => {
  it("renders all steps with their images", () => {
    renderHistory(container, smallHistory());
    expect(container.querySelectorAll(".step").length).toBe(3);
    expect(container.querySelectorAll("img.step-thumb").length).toBe(3);
  });

  it("bolds inserted words in the addition color", () => {
    renderHistory(container, smallHistory());
    const steps = container.querySelectorAll(".step");
    const inserted = steps[1].querySelector(".word-insert") as HTMLElement;
    expect(inserted.textContent).toBe("1girl");
    expect(inserted.style.fontWeight).toBe("bold");
    expect(inserted.style.color).toBe("rgb(70, 110, 143)"); // #466E8F
  });

  it("shows removed words struck through in the subtraction color", () => {
    renderHistory(container, smallHistory());
    const steps = container.querySelectorAll(".step");
    const removed = steps[1].querySelector(".word-gone") as HTMLElement;
    expect(removed.textContent).toBe("1boy");
    expect(removed.style.textDecoration).toContain("line-through");
    expect(removed.style.color).toBe("rgb(205, 48, 51)"); // #CD3033
  });

  it("weight-only changes are colored but not bold", () => {
    renderHistory(container, smallHistory());
    const steps = container.querySelectorAll(".step");
    const reweighted = steps[2].querySelector(".word-increase_weight") as HTMLElement;
    expect(reweighted.textContent).toContain("1girl");
    expect(reweighted.style.fontWeight).not.toBe("bold");
    expect(reweighted.style.color).toBe("rgb(70, 110, 143)");
  });

  it("first step has no highlights", () => {
    renderHistory(container, smallHistory());
    const first = container.querySelectorAll(".step")[0];
    expect(first.querySelectorAll('[class*="word-"]').length).toBe(0);
  });

  it("clicking a step hands its prompt to the creation panel", () => {
    const onUsePrompt = vi.fn();
    renderHistory(container, smallHistory(), { onUsePrompt });
    (container.querySelectorAll(".step")[0] as HTMLElement).click();
    expect(onUsePrompt).toHaveBeenCalledWith("masterpiece, 1boy, smile");
  });

  it("wordActions matches weight-syntax display words", () => {
    const actions = wordActions("masterpiece, (1girl:1.3), smile", [
      { word: "1girl", action: "increase_weight", weight_before: 1, weight_after: 1.3 },
    ]);
    expect(actions.get(1)).toBe("increase_weight");
  });
});

describe("mini-map view", () => {
  it("renders a dot per step and an arc per similar pair", () => {
    const doc = smallDocument();
    renderMinimap(container, doc.minimap);
    expect(container.querySelectorAll(".dot").length).toBe(3);
    expect(container.querySelectorAll(".arc").length).toBe(3);
  });

  it("emphasized arcs are bolder and darker", () => {
    renderMinimap(container, smallDocument().minimap);
    const emphasized = container.querySelector('[data-emphasized="true"]');
    const plain = container.querySelector('[data-emphasized="false"]');
    expect(Number(emphasized?.getAttribute("stroke-width"))).toBeGreaterThan(
      Number(plain?.getAttribute("stroke-width")),
    );
  });

  it("dot size grows with token count", () => {
    renderMinimap(container, smallDocument().minimap);
    const radii = Array.from(container.querySelectorAll(".dot")).map((d) =>
      Number(d.getAttribute("r")),
    );
    expect(radii[2]).toBeGreaterThan(radii[0]);
  });

  it("clicking a stage line splits, clicking a gap merges", () => {
    const onSplit = vi.fn();
    const onMerge = vi.fn();
    renderMinimap(container, smallDocument().minimap, { onSplit, onMerge });
    const line = container.querySelector(".stage-line") as SVGElement;
    const gap = container.querySelector(".stage-gap") as SVGElement;
    line.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    gap.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(onSplit).toHaveBeenCalledWith(2); // inside stage [1,2]
    expect(onMerge).toHaveBeenCalledWith(3); // boundary between stages
  });
});

describe("controls", () => {
  it("slider input updates state and triggers a change", () => {
    const state = defaultState();
    const onChange = vi.fn();
    renderControls(container, state, { onChange, onToggleGraph: vi.fn() });
    const alpha = container.querySelector("#alpha") as HTMLInputElement;
    alpha.value = "0.8";
    alpha.dispatchEvent(new Event("input", { bubbles: true }));
    expect(state.alpha).toBe(0.8);
    expect(onChange).toHaveBeenCalled();
  });

  it("graph toggle flips visibility without refetching", () => {
    const state = defaultState();
    const onChange = vi.fn();
    const onToggleGraph = vi.fn();
    renderControls(container, state, { onChange, onToggleGraph });
    (container.querySelector("#toggle-graph") as HTMLButtonElement).click();
    expect(state.showGraph).toBe(false);
    expect(onToggleGraph).toHaveBeenCalledWith(false);
    expect(onChange).not.toHaveBeenCalled();
  });

  it("w_min auto checkbox switches to manual and back", () => {
    const state = defaultState();
    const onChange = vi.fn();
    renderControls(container, state, { onChange, onToggleGraph: vi.fn() });
    const auto = container.querySelector("#w-min-auto") as HTMLInputElement;
    expect(state.wMin).toBeNull();
    auto.checked = false;
    auto.dispatchEvent(new Event("change", { bubbles: true }));
    expect(state.wMin).not.toBeNull();
    auto.checked = true;
    auto.dispatchEvent(new Event("change", { bubbles: true }));
    expect(state.wMin).toBeNull();
  });
});
