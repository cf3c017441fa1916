// The main graph view: thumbnails/rects at engine positions, tapered
// bundled edges routed through word glyphs, group bubbles, and an
// embedding inset. Pure rendering: every coordinate, weight, angle, and
// grouping comes from the layout document.

import { clear, svg } from "./dom";
import { ACTION_COLORS, clusterColor, orderShadeColor } from "./palette";
import type { Bundle, Glyph, GraphNode, LayoutDocument } from "./types";

export interface GraphViewHandlers {
  onNodeClick?: (node: GraphNode) => void;
  onWordClick?: (word: string) => void;
}

const VIEW_W = 1200;
const VIEW_H = 800;
const BUBBLE_PAD = 40;

function convexHull(points: [number, number][]): [number, number][] {
  // Andrew monotone chain; fine for bubble-sized point sets.
  const pts = [...points].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  if (pts.length <= 2) return pts;
  const cross = (o: number[], a: number[], b: number[]) =>
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  const lower: [number, number][] = [];
  for (const p of pts) {
    while (lower.length >= 2 && cross(lower[lower.length - 2], lower[lower.length - 1], p) <= 0)
      lower.pop();
    lower.push(p);
  }
  const upper: [number, number][] = [];
  for (const p of [...pts].reverse()) {
    while (upper.length >= 2 && cross(upper[upper.length - 2], upper[upper.length - 1], p) <= 0)
      upper.pop();
    upper.push(p);
  }
  lower.pop();
  upper.pop();
  return lower.concat(upper);
}

function taperPoints(
  from: [number, number],
  to: [number, number],
  width: number,
): string {
  const dx = to[0] - from[0];
  const dy = to[1] - from[1];
  const len = Math.hypot(dx, dy) || 1;
  const nx = -dy / len;
  const ny = dx / len;
  const half = width / 2;
  return [
    `${from[0] + nx * half},${from[1] + ny * half}`,
    `${from[0] - nx * half},${from[1] - ny * half}`,
    `${to[0]},${to[1]}`,
  ].join(" ");
}

function renderBubbles(
  root: SVGElement,
  doc: LayoutDocument,
  groupingMode: "cluster" | "stage",
): void {
  const positions = new Map(doc.nodes.map((n) => [n.image_id, [n.x, n.y] as [number, number]]));
  const source = doc.bubbles_all ?? doc.bubbles;
  for (const bubble of source) {
    // filled bubbles follow the grouping mode; dashed same-prompt
    // bubbles always show (swapping modes needs no rebuild)
    if (bubble.kind !== "same_prompt" && bubble.kind !== groupingMode) continue;
    const pts = bubble.members
      .map((id) => positions.get(id))
      .filter((p): p is [number, number] => p !== undefined);
    if (pts.length === 0) continue;
    const hull = convexHull(pts);
    const d =
      hull.map((p, i) => `${i === 0 ? "M" : "L"} ${p[0]} ${p[1]}`).join(" ") + " Z";
    // fat round-joined stroke in the fill color = padded convex contour
    const path = svg("path", {
      d,
      class: `bubble bubble-${bubble.style}`,
      "data-kind": bubble.kind,
      fill: bubble.style === "filled" ? "#eef1f6" : "none",
      stroke: bubble.style === "filled" ? "#eef1f6" : "#9aa7b8",
      "stroke-width": String(BUBBLE_PAD * 2),
      "stroke-linejoin": "round",
      "stroke-linecap": "round",
    });
    if (bubble.style === "dashed") {
      path.setAttribute("stroke", "#9aa7b8");
      path.setAttribute("stroke-width", "2");
      path.setAttribute("stroke-dasharray", "7,5");
      path.setAttribute("d", paddedOutline(hull));
    }
    const title = svg("title", {}, bubble.label);
    path.appendChild(title);
    root.appendChild(path);
  }
}

function paddedOutline(hull: [number, number][]): string {
  // dashed bubbles cannot use the fat-stroke trick, so offset the hull
  // outward from its centroid instead
  const cx = hull.reduce((s, p) => s + p[0], 0) / hull.length;
  const cy = hull.reduce((s, p) => s + p[1], 0) / hull.length;
  const out = hull.map(([x, y]) => {
    const dx = x - cx;
    const dy = y - cy;
    const len = Math.hypot(dx, dy) || 1;
    return [x + (dx / len) * BUBBLE_PAD, y + (dy / len) * BUBBLE_PAD];
  });
  if (out.length === 1) {
    const [p] = out;
    return `M ${p[0] - BUBBLE_PAD} ${p[1]} a ${BUBBLE_PAD} ${BUBBLE_PAD} 0 1 0 ${2 * BUBBLE_PAD} 0 a ${BUBBLE_PAD} ${BUBBLE_PAD} 0 1 0 ${-2 * BUBBLE_PAD} 0`;
  }
  return out.map((p, i) => `${i === 0 ? "M" : "L"} ${p[0]} ${p[1]}`).join(" ") + " Z";
}

function renderEdges(root: SVGElement, doc: LayoutDocument): void {
  const positions = new Map(doc.nodes.map((n) => [n.image_id, [n.x, n.y] as [number, number]]));
  const glyphOfBundle = new Map<number, Glyph>();
  for (const glyph of doc.glyphs)
    for (const id of glyph.bundles) glyphOfBundle.set(id, glyph);

  for (const bundle of doc.bundles) {
    if (!bundle.visible) continue;
    const color = ACTION_COLORS[bundle.action];
    const glyph = glyphOfBundle.get(bundle.id);
    for (const member of bundle.members) {
      const src = positions.get(member.src);
      const tgt = positions.get(member.tgt);
      if (!src || !tgt) continue;
      const width = 2 + 10 * member.weight; // wide at the source
      const segments: [[number, number], [number, number], number][] = glyph
        ? [
            [src, [glyph.x, glyph.y], width],
            [[glyph.x, glyph.y], tgt, width * 0.55],
          ]
        : [[src, tgt, width]];
      for (const [from, to, w] of segments) {
        root.appendChild(
          svg("polygon", {
            points: taperPoints(from, to, w),
            class: `edge edge-${bundle.action}`,
            "data-bundle": String(bundle.id),
            fill: color,
            "fill-opacity": "0.4",
          }),
        );
      }
    }
  }
}

function slicePath(cx: number, cy: number, r: number, a0: number, a1: number): string {
  const x0 = cx + r * Math.cos(a0);
  const y0 = cy + r * Math.sin(a0);
  const x1 = cx + r * Math.cos(a1);
  const y1 = cy + r * Math.sin(a1);
  const large = a1 - a0 > Math.PI ? 1 : 0;
  return `M ${cx} ${cy} L ${x0} ${y0} A ${r} ${r} 0 ${large} 1 ${x1} ${y1} Z`;
}

function renderGlyphs(
  root: SVGElement,
  doc: LayoutDocument,
  handlers: GraphViewHandlers,
): void {
  const R = 13;
  for (const glyph of doc.glyphs) {
    const group = svg("g", { class: "glyph" });
    let angle = -Math.PI / 2;
    for (const slice of glyph.slices) {
      const span = slice.angle_fraction * 2 * Math.PI;
      const radius = Math.max(3, R * slice.radius_fraction);
      const shape =
        slice.angle_fraction >= 1 - 1e-9
          ? svg("circle", { cx: String(glyph.x), cy: String(glyph.y), r: String(radius) })
          : svg("path", { d: slicePath(glyph.x, glyph.y, radius, angle, angle + span) });
      shape.setAttribute("class", `slice slice-${slice.action} opacity-${slice.opacity_class}`);
      shape.setAttribute("fill", ACTION_COLORS[slice.action]);
      shape.setAttribute("fill-opacity", slice.opacity_class === "low" ? "0.35" : "0.95");
      shape.addEventListener("click", () => handlers.onWordClick?.(slice.word));
      group.appendChild(shape);
      angle += span;
    }
    const label = svg(
      "text",
      {
        x: String(glyph.x + R + 4),
        y: String(glyph.y + 4),
        class: "glyph-label",
      },
      glyph.label_words.join(" "),
    );
    group.appendChild(label);
    root.appendChild(group);
  }
}

function renderNodes(
  root: SVGElement,
  doc: LayoutDocument,
  handlers: GraphViewHandlers,
  selected: string | null,
): void {
  for (const node of doc.nodes) {
    const group = svg("g", {
      class: `node node-${node.mode}${selected === node.image_id ? " selected" : ""}`,
      "data-node": node.image_id,
      "data-step": node.step_id,
      "data-mode": node.mode,
      "data-cluster": String(node.cluster),
    });
    const half = node.size / 2;
    if (node.mode === "thumbnail") {
      const image = svg("image", {
        x: String(node.x - half),
        y: String(node.y - half),
        width: String(node.size),
        height: String(node.size),
      });
      image.setAttribute("href", node.asset_url);
      group.appendChild(image);
      group.appendChild(
        svg("rect", {
          x: String(node.x - half),
          y: String(node.y - half),
          width: String(node.size),
          height: String(node.size),
          fill: "none",
          stroke: orderShadeColor(node.order_shade),
          "stroke-width": "3",
          class: "node-border",
        }),
      );
    } else {
      group.appendChild(
        svg("rect", {
          x: String(node.x - half),
          y: String(node.y - half),
          width: String(node.size),
          height: String(node.size),
          fill: orderShadeColor(node.order_shade),
          class: "node-rect",
        }),
      );
    }
    const title = svg("title", {}, `step ${node.step_order} (${node.mode})`);
    group.appendChild(title);
    group.addEventListener("click", () => handlers.onNodeClick?.(node));
    root.appendChild(group);
  }
}

function renderInset(root: SVGElement, doc: LayoutDocument): void {
  // overall node distribution and clusters, top-left corner
  const inset = svg("g", { class: "embedding-inset" });
  const W = 180;
  const H = 120;
  const PAD = 10;
  inset.appendChild(
    svg("rect", {
      x: "8",
      y: "8",
      width: String(W),
      height: String(H),
      fill: "white",
      stroke: "#c5ccd6",
      rx: "6",
    }),
  );
  if (doc.nodes.length > 0) {
    const xs = doc.nodes.map((n) => n.x);
    const ys = doc.nodes.map((n) => n.y);
    const lo = [Math.min(...xs), Math.min(...ys)];
    const hi = [Math.max(...xs), Math.max(...ys)];
    const spanX = hi[0] - lo[0] || 1;
    const spanY = hi[1] - lo[1] || 1;
    for (const node of doc.nodes) {
      inset.appendChild(
        svg("circle", {
          cx: String(8 + PAD + ((node.x - lo[0]) / spanX) * (W - 2 * PAD)),
          cy: String(8 + PAD + ((node.y - lo[1]) / spanY) * (H - 2 * PAD)),
          r: "3",
          fill: clusterColor(node.cluster),
          class: "inset-dot",
        }),
      );
    }
  }
  root.appendChild(inset);
}

export function renderGraph(
  container: HTMLElement,
  doc: LayoutDocument | null,
  showGraph: boolean,
  handlers: GraphViewHandlers = {},
  selectedNode: string | null = null,
  groupingMode: "cluster" | "stage" = "cluster",
): void {
  clear(container);
  if (!showGraph) {
    container.appendChild(
      Object.assign(document.createElement("div"), {
        className: "graph-hidden-hint",
        textContent: "graph hidden",
      }),
    );
    return;
  }
  if (!doc || doc.nodes.length === 0) {
    container.appendChild(
      Object.assign(document.createElement("div"), {
        className: "graph-empty-hint",
        textContent: "No images yet. Generate a first step to see the graph.",
      }),
    );
    return;
  }
  const root = svg("svg", {
    class: "graph-canvas",
    viewBox: `0 0 ${VIEW_W} ${VIEW_H}`,
    preserveAspectRatio: "xMidYMid meet",
  });
  renderBubbles(root, doc, groupingMode);
  renderEdges(root, doc);
  renderGlyphs(root, doc, handlers);
  renderNodes(root, doc, handlers, selectedNode);
  renderInset(root, doc);
  container.appendChild(root);
}
