// Control panel: graph visibility toggle, the four pipeline sliders
// (embedding combination weight, similarity threshold, bundle-weight
// threshold with auto mode, cluster distance), and bubble grouping mode.

import { el } from "./dom";
import type { ViewState } from "./state";

export interface ControlHandlers {
  onChange: (state: ViewState) => void;
  onToggleGraph: (visible: boolean) => void;
}

function sliderRow(
  label: string,
  id: string,
  min: number,
  max: number,
  step: number,
  value: number,
  onInput: (value: number) => void,
): HTMLElement {
  const row = el("label", { class: "control-row", for: id });
  row.appendChild(el("span", { class: "control-label" }, label));
  const input = el("input", {
    type: "range",
    id,
    min: String(min),
    max: String(max),
    step: String(step),
    value: String(value),
  });
  const readout = el("span", { class: "control-value" }, String(value));
  input.addEventListener("input", () => {
    readout.textContent = input.value;
    onInput(Number(input.value));
  });
  row.appendChild(input);
  row.appendChild(readout);
  return row;
}

export function renderControls(
  container: HTMLElement,
  state: ViewState,
  handlers: ControlHandlers,
): void {
  container.textContent = "";

  const toggle = el(
    "button",
    { id: "toggle-graph", class: state.showGraph ? "on" : "off" },
    "Graph",
  );
  toggle.addEventListener("click", () => {
    state.showGraph = !state.showGraph;
    toggle.className = state.showGraph ? "on" : "off";
    handlers.onToggleGraph(state.showGraph);
  });
  container.appendChild(toggle);

  container.appendChild(
    sliderRow("text/image weight", "alpha", 0, 1, 0.05, state.alpha, (v) => {
      state.alpha = v;
      handlers.onChange(state);
    }),
  );
  container.appendChild(
    sliderRow("similarity threshold", "s-min", 0, 1, 0.05, state.sMin, (v) => {
      state.sMin = v;
      handlers.onChange(state);
    }),
  );

  const wRow = el("label", { class: "control-row", for: "w-min" });
  wRow.appendChild(el("span", { class: "control-label" }, "weight threshold"));
  const wInput = el("input", {
    type: "range",
    id: "w-min",
    min: "0",
    max: "3",
    step: "0.05",
    value: String(state.wMin ?? 0),
  });
  if (state.wMin === null) wInput.setAttribute("disabled", "");
  const wAuto = el("input", { type: "checkbox", id: "w-min-auto" });
  (wAuto as HTMLInputElement).checked = state.wMin === null;
  const wReadout = el(
    "span",
    { class: "control-value" },
    state.wMin === null ? "auto" : String(state.wMin),
  );
  wInput.addEventListener("input", () => {
    state.wMin = Number((wInput as HTMLInputElement).value);
    wReadout.textContent = (wInput as HTMLInputElement).value;
    handlers.onChange(state);
  });
  wAuto.addEventListener("change", () => {
    if ((wAuto as HTMLInputElement).checked) {
      state.wMin = null;
      wInput.setAttribute("disabled", "");
      wReadout.textContent = "auto";
    } else {
      wInput.removeAttribute("disabled");
      state.wMin = Number((wInput as HTMLInputElement).value);
      wReadout.textContent = (wInput as HTMLInputElement).value;
    }
    handlers.onChange(state);
  });
  wRow.appendChild(wInput);
  wRow.appendChild(wReadout);
  wRow.appendChild(wAuto);
  wRow.appendChild(el("span", { class: "control-hint" }, "auto"));
  container.appendChild(wRow);

  container.appendChild(
    sliderRow(
      "cluster distance",
      "cluster-distance",
      0.05,
      3,
      0.05,
      state.clusterDistance,
      (v) => {
        state.clusterDistance = v;
        handlers.onChange(state);
      },
    ),
  );

  const modeRow = el("label", { class: "control-row", for: "grouping-mode" });
  modeRow.appendChild(el("span", { class: "control-label" }, "bubbles"));
  const select = el("select", { id: "grouping-mode" });
  for (const mode of ["cluster", "stage"]) {
    const option = el("option", { value: mode }, mode);
    if (mode === state.groupingMode) option.setAttribute("selected", "");
    select.appendChild(option);
  }
  select.addEventListener("change", () => {
    state.groupingMode = (select as HTMLSelectElement).value as "cluster" | "stage";
    handlers.onChange(state);
  });
  modeRow.appendChild(select);
  container.appendChild(modeRow);
}
