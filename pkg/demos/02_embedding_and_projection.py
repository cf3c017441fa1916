#!/usr/bin/env python3
"""Dual embeddings, t-SNE projection, Procrustes alignment, clustering.

Run: python3 demos/02_embedding_and_projection.py
"""

import numpy as np

from promptgraph import StubImageBackend, GenerationRequest, cluster, project_pair
from promptgraph.embedding import StubEmbeddingProvider
from promptgraph.projection import procrustes_align

PROMPTS = [
    "a quiet harbor at dawn",
    "a quiet harbor at dawn, fog",
    "a quiet harbor at dawn, fog, oil painting",
    "city skyline at night, neon lights",
    "city skyline at night, neon lights, rain",
    "city skyline at night, rain, reflections",
]

stub = StubEmbeddingProvider()
backend = StubImageBackend()

ids, text_vecs, image_vecs = [], [], []
for i, prompt in enumerate(PROMPTS):
    for k, data in enumerate(
        backend.generate(GenerationRequest(prompt=prompt, n=2, seed=i, width=64, height=64))
    ):
        ids.append(f"s{i}-{k}")
        text_vecs.append(stub.embed_text(prompt))
        image_vecs.append(stub.embed_image(data))

proj = project_pair(
    tuple(ids), np.stack(text_vecs), np.stack(image_vecs), alpha=0.5, seed=7
)
print(f"projected {len(ids)} images; procrustes disparity = {proj.disparity:.4f}")
print("first three combined positions:")
for image_id, (x, y) in list(zip(ids, proj.combined_xy))[:3]:
    print(f"  {image_id}: ({x:+.3f}, {y:+.3f})")

assignment = cluster(proj.combined_xy, 0.7, tuple(ids))
print(f"\nclusters at distance 0.7: {assignment.n_clusters}")
for cid in range(assignment.n_clusters):
    print(f"  cluster {cid}: {assignment.members(cid)}")

print("\n=== procrustes recovers a similarity transform exactly ===")
rng = np.random.default_rng(0)
target = rng.normal(size=(10, 2))
theta = np.pi / 5
rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
source = 3.0 * target @ rot.T + np.array([12.0, -4.0])
aligned, disparity = procrustes_align(source, target)
print(f"disparity: {disparity:.2e}   max residual: {np.abs(aligned - target).max():.2e}")
