// Mirrors docs/schema.md (layout document schema version 1) plus the
// session/history/job payloads. The UI renders these numbers verbatim;
// it never recomputes weights, positions, or angles.

export type EditAction =
  | "insert"
  | "remove"
  | "reorder"
  | "increase_weight"
  | "decrease_weight";

export interface SessionInfo {
  id: string;
  title: string;
  created_at: number;
  step_count: number;
}

export interface GraphNode {
  image_id: string;
  step_id: string;
  step_order: number;
  x: number;
  y: number;
  mode: "thumbnail" | "rect";
  size: number;
  order_shade: number;
  cluster: number;
  weight: number;
  asset_url: string;
}

export interface BundleMember {
  src: string;
  tgt: string;
  weight: number;
}

export interface Bundle {
  id: number;
  word: string;
  action: EditAction;
  src_cluster: number;
  tgt_cluster: number;
  weight: number;
  visible: boolean;
  members: BundleMember[];
}

export interface GlyphSlice {
  word: string;
  action: EditAction;
  angle_fraction: number;
  radius_fraction: number;
  opacity_class: "normal" | "low";
}

export interface Glyph {
  x: number;
  y: number;
  slices: GlyphSlice[];
  label_words: string[];
  bundles: number[];
}

export interface Bubble {
  kind: "cluster" | "stage" | "same_prompt";
  members: string[];
  style: "filled" | "dashed";
  label: string;
}

export interface MiniMapDot {
  step_id: string;
  token_count: number;
  order_shade: number;
}

export interface MiniMapArc {
  src_step: string;
  tgt_step: string;
  similarity: number;
  emphasized: boolean;
}

export interface MiniMap {
  dots: MiniMapDot[];
  arcs: MiniMapArc[];
  stage_lines: [number, number][];
}

export interface LayoutDocument {
  schema_version: number;
  session: { id: string; title: string; step_count: number };
  params: {
    alpha: number;
    s_min: number;
    w_min: number;
    w_min_mode: "auto" | "manual";
    n_e: number;
    cluster_distance: number;
    grouping_mode: "cluster" | "stage";
    seed: number;
  };
  degraded_embeddings: boolean;
  nodes: GraphNode[];
  bundles: Bundle[];
  glyphs: Glyph[];
  bubbles: Bubble[];
  bubbles_all: Bubble[];
  stages: { ranges: [number, number][]; applied_overrides: { op: string; at: number }[] };
  minimap: MiniMap;
  parse_warnings: Record<string, string[]>;
}

export interface StepDoc {
  id: string;
  session_id: string;
  order: number;
  prompt: string;
  params: Record<string, unknown>;
  image_ids: string[];
  image_urls: string[];
  created_at: number;
  status: "completed" | "failed";
}

export interface DiffOp {
  word: string;
  action: EditAction;
  weight_before: number | null;
  weight_after: number | null;
}

export interface Transition {
  src_step: string;
  tgt_step: string;
  similarity: number;
  similar: boolean;
  ops: DiffOp[] | null;
}

export interface HistoryResponse {
  session: SessionInfo;
  steps: StepDoc[];
  transitions: Transition[];
  s_min: number;
}

export interface JobStatus {
  job_id: string;
  status: "pending" | "completed" | "failed";
  step: StepDoc | null;
  error: string | null;
}

export interface StagePatchResponse {
  stages: [number, number][];
  applied_overrides: { op: string; at: number }[];
}
