import { ApiClient } from "./api";
import { App } from "./app";

function required<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in index.html`);
  return node as T;
}

const app = new App(new ApiClient(), {
  graph: required("view-graph"),
  history: required("view-history"),
  minimap: required("view-minimap"),
  controls: required("panel-controls"),
  creation: required("panel-creation"),
  sessionSelect: required<HTMLSelectElement>("session-select"),
  newSessionButton: required("session-new"),
});

app.init().catch((err) => {
  const banner = document.createElement("div");
  banner.className = "fatal-error";
  banner.textContent = `failed to start: ${err}`;
  document.body.prepend(banner);
});
