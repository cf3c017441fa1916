// One palette for the whole app: graph glyphs/edges, history highlights,
// and mini-map shades all pull from here.

import type { EditAction } from "./types";

export const ACTION_COLORS: Record<EditAction, string> = {
  insert: "#466E8F",
  increase_weight: "#466E8F",
  remove: "#CD3033",
  decrease_weight: "#CD3033",
  reorder: "#57B28F",
};

/** Bold marks a word appearing/disappearing; weight changes only color. */
export const BOLD_ACTIONS: ReadonlySet<EditAction> = new Set([
  "insert",
  "remove",
]);

/** Temporal gray: order_shade 0 (oldest, light) .. 1 (latest, dark). */
export function orderShadeColor(shade: number): string {
  const level = Math.round(225 - 170 * Math.min(Math.max(shade, 0), 1));
  return `rgb(${level},${level},${level})`;
}

export const CLUSTER_COLORS = [
  "#8da0cb", "#fc8d62", "#66c2a5", "#e78ac3", "#a6d854",
  "#ffd92f", "#b3b3b3", "#e5c494",
];

export function clusterColor(cluster: number): string {
  return CLUSTER_COLORS[cluster % CLUSTER_COLORS.length];
}
