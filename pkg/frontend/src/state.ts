// Everything needed to reproduce a view is (sessionId, ViewState):
// refresh-safe by construction.

export interface ViewState {
  sessionId: string | null;
  alpha: number;
  sMin: number;
  wMin: number | null; // null = auto
  clusterDistance: number;
  groupingMode: "cluster" | "stage";
  showGraph: boolean;
  selectedNode: string | null;
  selectedWord: string | null;
}

export function defaultState(): ViewState {
  return {
    sessionId: null,
    alpha: 0.5,
    sMin: 0.6,
    wMin: null,
    clusterDistance: 0.7,
    groupingMode: "cluster",
    showGraph: true,
    selectedNode: null,
    selectedWord: null,
  };
}
