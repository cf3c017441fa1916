import type {
  HistoryResponse,
  JobStatus,
  LayoutDocument,
  SessionInfo,
  StagePatchResponse,
} from "./types";

export interface GraphParams {
  alpha: number;
  s_min: number;
  w_min: number | null; // null = auto threshold
  cluster_distance: number;
  grouping_mode: "cluster" | "stage";
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && body.detail) detail = JSON.stringify(body.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new Error(`${resp.status}: ${detail}`);
  }
  return resp.json() as Promise<T>;
}

/** Thin client for the /api/v1 endpoints; base defaults to same-origin. */
export class ApiClient {
  constructor(private base: string = "") {}

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  listSessions(): Promise<SessionInfo[]> {
    return fetch(this.url("/sessions")).then((r) => asJson<SessionInfo[]>(r));
  }

  createSession(title: string): Promise<SessionInfo> {
    return fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ title }),
    }).then((r) => asJson<SessionInfo>(r));
  }

  getGraph(
    sessionId: string,
    params: GraphParams,
    signal?: AbortSignal,
  ): Promise<LayoutDocument> {
    const q = new URLSearchParams({
      alpha: String(params.alpha),
      s_min: String(params.s_min),
      cluster_distance: String(params.cluster_distance),
      grouping_mode: params.grouping_mode,
    });
    if (params.w_min !== null) q.set("w_min", String(params.w_min));
    return fetch(this.url(`/sessions/${sessionId}/graph?${q}`), { signal }).then(
      (r) => asJson<LayoutDocument>(r),
    );
  }

  getHistory(sessionId: string, sMin: number): Promise<HistoryResponse> {
    return fetch(
      this.url(`/sessions/${sessionId}/history?s_min=${sMin}`),
    ).then((r) => asJson<HistoryResponse>(r));
  }

  generate(
    sessionId: string,
    body: { prompt: string; n: number; seed: number; width?: number; height?: number },
  ): Promise<{ job_id: string; status: string }> {
    return fetch(this.url(`/sessions/${sessionId}/generate`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => asJson<{ job_id: string; status: string }>(r));
  }

  jobStatus(sessionId: string, jobId: string): Promise<JobStatus> {
    return fetch(this.url(`/sessions/${sessionId}/jobs/${jobId}`)).then((r) =>
      asJson<JobStatus>(r),
    );
  }

  patchStages(
    sessionId: string,
    op: "split" | "merge",
    at: number,
    sMin: number,
  ): Promise<StagePatchResponse> {
    const body = op === "split" ? { op, step: at } : { op, boundary: at };
    return fetch(this.url(`/sessions/${sessionId}/stages?s_min=${sMin}`), {
      method: "PATCH",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => asJson<StagePatchResponse>(r));
  }

  /** Poll a generation job until it settles or the deadline passes. */
  async waitForJob(
    sessionId: string,
    jobId: string,
    pollMs = 1000,
    timeoutMs = 60_000,
  ): Promise<JobStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.jobStatus(sessionId, jobId);
      if (status.status !== "pending") return status;
      if (Date.now() > deadline) throw new Error("generation timed out");
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }
}
