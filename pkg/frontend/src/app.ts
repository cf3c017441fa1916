// Wires the four views to the API. One in-flight graph request at a time
// (latest wins); generation polls at 1 Hz and refreshes every view when a
// step lands. The app computes nothing itself.

import { ApiClient } from "./api";
import { renderControls } from "./controls";
import { CreationPanel, renderCreation } from "./creation";
import { renderHistory } from "./history";
import { renderGraph } from "./graphview";
import { renderMinimap } from "./minimap";
import { ViewState, defaultState } from "./state";
import type { HistoryResponse, LayoutDocument } from "./types";

export interface AppElements {
  graph: HTMLElement;
  history: HTMLElement;
  minimap: HTMLElement;
  controls: HTMLElement;
  creation: HTMLElement;
  sessionSelect: HTMLSelectElement;
  newSessionButton: HTMLElement;
}

export class App {
  readonly state: ViewState = defaultState();
  doc: LayoutDocument | null = null;
  history: HistoryResponse | null = null;
  private creationPanel: CreationPanel | null = null;
  private inflight: AbortController | null = null;
  private generating = false;

  constructor(
    private api: ApiClient,
    private els: AppElements,
    private pollMs = 1000,
  ) {}

  async init(): Promise<void> {
    renderControls(this.els.controls, this.state, {
      onChange: () => void this.refreshAll(),
      onToggleGraph: () => this.renderGraphView(),
    });
    this.creationPanel = renderCreation(this.els.creation, {
      onGenerate: (prompt, n, seed) => void this.generate(prompt, n, seed),
    });
    this.els.newSessionButton.addEventListener("click", () => {
      const title = window.prompt("session title?") ?? "";
      void this.createSession(title);
    });
    this.els.sessionSelect.addEventListener("change", () => {
      this.state.sessionId = this.els.sessionSelect.value || null;
      void this.refreshAll();
    });

    const sessions = await this.api.listSessions();
    if (sessions.length === 0) {
      await this.createSession("first session");
    } else {
      this.populateSessions(sessions.map((s) => [s.id, s.title]));
      this.state.sessionId = sessions[sessions.length - 1].id;
      this.els.sessionSelect.value = this.state.sessionId;
      await this.refreshAll();
    }
  }

  private populateSessions(entries: [string, string][]): void {
    this.els.sessionSelect.textContent = "";
    for (const [id, title] of entries) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = title;
      this.els.sessionSelect.appendChild(option);
    }
  }

  async createSession(title: string): Promise<void> {
    const session = await this.api.createSession(title);
    const sessions = await this.api.listSessions();
    this.populateSessions(sessions.map((s) => [s.id, s.title]));
    this.state.sessionId = session.id;
    this.els.sessionSelect.value = session.id;
    await this.refreshAll();
  }

  /** Refetch graph + history and redraw the three views. */
  async refreshAll(): Promise<void> {
    if (!this.state.sessionId) return;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const graphPromise = this.api.getGraph(
      this.state.sessionId,
      {
        alpha: this.state.alpha,
        s_min: this.state.sMin,
        w_min: this.state.wMin,
        cluster_distance: this.state.clusterDistance,
        grouping_mode: this.state.groupingMode,
      },
      controller.signal,
    );
    const historyPromise = this.api.getHistory(this.state.sessionId, this.state.sMin);
    try {
      const [doc, history] = await Promise.all([graphPromise, historyPromise]);
      if (controller !== this.inflight) return; // a newer request won
      this.doc = doc;
      this.history = history;
    } catch (err) {
      if ((err as Error).name === "AbortError") return;
      throw err;
    }
    this.renderGraphView();
    this.renderHistoryView();
    this.renderMinimapView();
  }

  renderGraphView(): void {
    renderGraph(
      this.els.graph,
      this.doc,
      this.state.showGraph,
      {
        onNodeClick: (node) => {
          this.state.selectedNode =
            this.state.selectedNode === node.image_id ? null : node.image_id;
          this.renderGraphView();
        },
        onWordClick: (word) => {
          this.state.selectedWord = word;
        },
      },
      this.state.selectedNode,
      this.state.groupingMode,
    );
  }

  renderHistoryView(): void {
    renderHistory(this.els.history, this.history, {
      onUsePrompt: (prompt) => this.creationPanel?.setPrompt(prompt),
    });
  }

  renderMinimapView(): void {
    renderMinimap(this.els.minimap, this.doc?.minimap ?? null, {
      onSplit: (step) => void this.patchStage("split", step),
      onMerge: (boundary) => void this.patchStage("merge", boundary),
    });
  }

  async patchStage(op: "split" | "merge", at: number): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      await this.api.patchStages(this.state.sessionId, op, at, this.state.sMin);
    } catch (err) {
      this.creationPanel?.setStatus(`stage edit rejected: ${(err as Error).message}`, "error");
      return;
    }
    await this.refreshAll();
  }

  async generate(prompt: string, n: number, seed: number): Promise<void> {
    if (!this.state.sessionId || this.generating) return;
    this.generating = true;
    this.creationPanel?.setStatus("generating...", "busy");
    try {
      const { job_id } = await this.api.generate(this.state.sessionId, {
        prompt,
        n,
        seed,
        width: 512,
        height: 512,
      });
      const status = await this.api.waitForJob(
        this.state.sessionId,
        job_id,
        this.pollMs,
      );
      if (status.status === "failed") {
        this.creationPanel?.setStatus(`generation failed: ${status.error}`, "error");
      } else {
        this.creationPanel?.setStatus(`step ${status.step?.order} completed`, "idle");
      }
    } catch (err) {
      this.creationPanel?.setStatus((err as Error).message, "error");
    } finally {
      this.generating = false;
    }
    await this.refreshAll(); // failed steps still appear in the history
  }
}
