// Hand-built minimal payloads following docs/schema.md, for render-logic
// tests that should not need a live engine.

import type { HistoryResponse, LayoutDocument } from "../src/types";

export function smallDocument(): LayoutDocument {
  return {
    schema_version: 1,
    session: { id: "s", title: "fixture", step_count: 3 },
    params: {
      alpha: 0.5,
      s_min: 0.6,
      w_min: 0,
      w_min_mode: "auto",
      n_e: 12,
      cluster_distance: 0.7,
      grouping_mode: "cluster",
      seed: 7,
    },
    degraded_embeddings: false,
    nodes: [
      {
        image_id: "img-a",
        step_id: "st1",
        step_order: 1,
        x: 200,
        y: 200,
        mode: "thumbnail",
        size: 64,
        order_shade: 0,
        cluster: 0,
        weight: 1,
        asset_url: "/api/v1/sessions/s/assets/img-a.png",
      },
      {
        image_id: "img-b",
        step_id: "st2",
        step_order: 2,
        x: 600,
        y: 300,
        mode: "thumbnail",
        size: 64,
        order_shade: 0.5,
        cluster: 1,
        weight: 2,
        asset_url: "/api/v1/sessions/s/assets/img-b.png",
      },
      {
        image_id: "img-c",
        step_id: "st3",
        step_order: 3,
        x: 610,
        y: 310,
        mode: "rect",
        size: 16,
        order_shade: 1,
        cluster: 1,
        weight: 1,
        asset_url: "/api/v1/sessions/s/assets/img-c.png",
      },
    ],
    bundles: [
      {
        id: 0,
        word: "white",
        action: "insert",
        src_cluster: 0,
        tgt_cluster: 1,
        weight: 1.75,
        visible: true,
        members: [
          { src: "img-a", tgt: "img-b", weight: 1 },
          { src: "img-a", tgt: "img-c", weight: 0.75 },
        ],
      },
      {
        id: 1,
        word: "hd",
        action: "remove",
        src_cluster: 0,
        tgt_cluster: 1,
        weight: 0.05,
        visible: false,
        members: [{ src: "img-a", tgt: "img-c", weight: 0.05 }],
      },
    ],
    glyphs: [
      {
        x: 400,
        y: 250,
        slices: [
          {
            word: "white",
            action: "insert",
            angle_fraction: 1,
            radius_fraction: 1,
            opacity_class: "normal",
          },
        ],
        label_words: ["+white"],
        bundles: [0],
      },
    ],
    bubbles: [
      { kind: "cluster", members: ["img-a"], style: "filled", label: "cluster 0" },
      { kind: "cluster", members: ["img-b", "img-c"], style: "filled", label: "cluster 1" },
      { kind: "same_prompt", members: ["img-b", "img-c"], style: "dashed", label: "p" },
    ],
    bubbles_all: [
      { kind: "cluster", members: ["img-a"], style: "filled", label: "cluster 0" },
      { kind: "cluster", members: ["img-b", "img-c"], style: "filled", label: "cluster 1" },
      { kind: "same_prompt", members: ["img-b", "img-c"], style: "dashed", label: "p" },
      { kind: "stage", members: ["img-a", "img-b"], style: "filled", label: "stage 1" },
      { kind: "stage", members: ["img-c"], style: "filled", label: "stage 2" },
    ],
    stages: { ranges: [[1, 2], [3, 3]], applied_overrides: [] },
    minimap: {
      dots: [
        { step_id: "st1", token_count: 2, order_shade: 0 },
        { step_id: "st2", token_count: 3, order_shade: 0.5 },
        { step_id: "st3", token_count: 4, order_shade: 1 },
      ],
      arcs: [
        { src_step: "st1", tgt_step: "st2", similarity: 0.8, emphasized: true },
        { src_step: "st1", tgt_step: "st3", similarity: 0.7, emphasized: false },
        { src_step: "st2", tgt_step: "st3", similarity: 0.9, emphasized: true },
      ],
      stage_lines: [[1, 2], [3, 3]],
    },
    parse_warnings: {},
  };
}

export function smallHistory(): HistoryResponse {
  return {
    session: { id: "s", title: "fixture", created_at: 0, step_count: 3 },
    steps: [
      {
        id: "st1",
        session_id: "s",
        order: 1,
        prompt: "masterpiece, 1boy, smile",
        params: {},
        image_ids: ["img-a"],
        image_urls: ["/api/v1/sessions/s/assets/img-a.png"],
        created_at: 0,
        status: "completed",
      },
      {
        id: "st2",
        session_id: "s",
        order: 2,
        prompt: "masterpiece, 1girl, smile",
        params: {},
        image_ids: ["img-b"],
        image_urls: ["/api/v1/sessions/s/assets/img-b.png"],
        created_at: 1,
        status: "completed",
      },
      {
        id: "st3",
        session_id: "s",
        order: 3,
        prompt: "masterpiece, (1girl:1.3), smile",
        params: {},
        image_ids: ["img-c"],
        image_urls: ["/api/v1/sessions/s/assets/img-c.png"],
        created_at: 2,
        status: "completed",
      },
    ],
    transitions: [
      {
        src_step: "st1",
        tgt_step: "st2",
        similarity: 0.5,
        similar: true,
        ops: [
          { word: "1boy", action: "remove", weight_before: null, weight_after: null },
          { word: "1girl", action: "insert", weight_before: null, weight_after: null },
        ],
      },
      {
        src_step: "st2",
        tgt_step: "st3",
        similarity: 1,
        similar: true,
        ops: [
          {
            word: "1girl",
            action: "increase_weight",
            weight_before: 1,
            weight_after: 1.3,
          },
        ],
      },
    ],
    s_min: 0.4,
  };
}
