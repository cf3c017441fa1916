#!/usr/bin/env python3
"""Edge derivation, bundling, weight redistribution, merging, filtering.

Follows the worked three-step session (cat / white cat / white cat, hd)
so the numbers can be checked by hand.

Run: python3 demos/03_variant_graph_weights.py
"""

from promptgraph import parse_prompt
from promptgraph.clustering import ClusterAssignment
from promptgraph.graph import (
    GraphParams,
    StepPrompt,
    bundle,
    compute_diffs,
    derive_edges,
    filter_bundles,
    merge_equal,
    node_weights,
    redistribute,
    redistributed_edges,
    ImageNode,
)

steps = [
    StepPrompt("s1", 1, parse_prompt("cat"), ("a",)),
    StepPrompt("s2", 2, parse_prompt("white cat"), ("b",)),
    StepPrompt("s3", 3, parse_prompt("white cat, hd"), ("c",)),
]
clusters = ClusterAssignment(by_image={"a": 0, "b": 1, "c": 1}, cluster_distance=1.0)

diffs = compute_diffs(steps, s_min=0.3)
edges = derive_edges(steps, diffs)
print("initial edges (weight = 1/(n1*n2*m)):")
for e in sorted(edges, key=lambda e: (e.src, e.tgt, e.word)):
    print(f"  {e.src}->{e.tgt}  {e.action}:{e.word:<6} w={e.weight:.4f}")

bundles = bundle(edges, clusters)
print("\nbundles (word, action, cluster pair) with summed weights:")
for b in bundles:
    print(f"  {b.word:<6} {b.action:<7} C{b.src_cluster}->C{b.tgt_cluster}  W={b.weight:.4f}")

red = redistribute(bundles)
print("\nafter one redistribution pass:")
for b in red:
    members = ", ".join(f"{e.src}->{e.tgt}={e.weight:.2f}" for e in b.members)
    print(f"  {b.word:<6} W={b.weight:.4f}   [{members}]")

final_edges = redistributed_edges(red)
print("\nequal-weight edges merge per image pair:")
for item in merge_equal(final_edges):
    print(f"  {item}")

nodes = [ImageNode("a", "s1", 1), ImageNode("b", "s2", 2), ImageNode("c", "s3", 3)]
print("\nnode weights (sum of incident edges):", node_weights(nodes, final_edges))

flagged, w_min = filter_bundles(red, GraphParams())
print(f"\nvisible bundles: {sum(b.visible for b in flagged)} (auto w_min={w_min})")
