"""End-to-end build: session snapshot in, layout document out.

The document is the single payload the UI renders; see docs/schema.md.
Building is a pure function of (snapshot, params, provider): identical
inputs produce an identical document. An opt-in position memory trades
that unconditional purity for frame-to-frame coherence while a session
grows (interactive mode).
"""

from __future__ import annotations

import hashlib
from typing import Sequence

import numpy as np

from . import clustering, graph, layout, projection
from .config import BuildParams
from .embedding import EmbeddingCache, EmbeddingProvider, StubEmbeddingProvider, embed_records
from .graph import MergedEdge, StepPrompt
from .prompts import PromptTokens, detect_phrases, jaccard_similarity, parse_prompt
from .store import SessionSnapshot, StepRecord

SCHEMA_VERSION = 1


def parse_session_prompts(steps: Sequence[StepRecord]) -> list[PromptTokens]:
    """Parse every prompt with phrase units detected over the session."""
    plain = [parse_prompt(s.prompt) for s in steps]
    if not plain:
        return []
    table = detect_phrases(plain)
    return [parse_prompt(s.prompt, table) for s in steps]


def step_prompts(
    steps: Sequence[StepRecord], tokens: Sequence[PromptTokens]
) -> list[StepPrompt]:
    return [
        StepPrompt(
            step_id=s.id,
            temporal_order=s.order,
            tokens=t,
            image_ids=s.image_ids,
        )
        for s, t in zip(steps, tokens)
    ]


def all_pair_similarities(steps: Sequence[StepPrompt]) -> dict[tuple[str, str], float]:
    ordered = sorted(steps, key=lambda s: s.temporal_order)
    sims = {}
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            sims[(ordered[i].step_id, ordered[j].step_id)] = jaccard_similarity(
                ordered[i].tokens, ordered[j].tokens
            )
    return sims


def asset_url(session_id: str, asset_id: str) -> str:
    return f"/api/v1/sessions/{session_id}/assets/{asset_id}.png"


MEMORY_DEPTH = 4  # snapshots of past frames kept for incremental seeding


def _previous_frame(
    position_memory: dict | None, version: int
) -> dict[str, tuple[float, float]] | None:
    """Newest remembered frame strictly older than the snapshot being
    built, so rebuilding the same version stays reproducible."""
    if not position_memory:
        return None
    candidates = [
        (v, positions)
        for v, positions in position_memory.get("frames", [])
        if v < version
    ]
    if not candidates:
        return None
    return max(candidates, key=lambda c: c[0])[1]


def _seed_init(
    image_ids: list[str], previous: dict[str, tuple[float, float]]
) -> np.ndarray:
    """t-SNE init: previous position for known images; new images start
    near the previous centroid with a deterministic per-id nudge."""
    known = np.asarray(list(previous.values()), dtype=float)
    center = known.mean(axis=0)
    spread = max(float(np.abs(known - center).max()), 1e-3)
    init = np.empty((len(image_ids), 2))
    for row, image_id in enumerate(image_ids):
        if image_id in previous:
            init[row] = previous[image_id]
        else:
            digest = hashlib.sha256(image_id.encode()).digest()
            jitter = (
                np.array([digest[0], digest[1]], dtype=float) / 255.0 - 0.5
            ) * 0.2 * spread
            init[row] = center + jitter
    return init


def _remember_frame(
    position_memory: dict | None,
    version: int,
    image_ids: list[str],
    combined: np.ndarray,
) -> None:
    if position_memory is None:
        return
    frames = [f for f in position_memory.get("frames", []) if f[0] != version]
    frames.append(
        (version, {i: (float(x), float(y)) for i, (x, y) in zip(image_ids, combined)})
    )
    frames.sort(key=lambda f: f[0])
    position_memory["frames"] = frames[-MEMORY_DEPTH:]


def build_layout_document(
    snapshot: SessionSnapshot,
    params: BuildParams,
    provider: EmbeddingProvider | None = None,
    cache: EmbeddingCache | None = None,
    fallback: StubEmbeddingProvider | None = None,
    position_memory: dict | None = None,
) -> dict:
    """Run the full pipeline over a frozen session view.

    ``position_memory`` opts into frame-coherent layouts for interactive
    use: the previous build's combined positions seed the optimizer and
    the new frame is Procrustes-aligned onto them, so nodes move as
    little as possible when a session grows. Without it, builds are a
    pure function of (snapshot, params).
    """
    provider = provider if provider is not None else StubEmbeddingProvider()

    all_steps = sorted(snapshot.steps, key=lambda s: s.order)
    tokens = parse_session_prompts(all_steps)
    prompts_all = step_prompts(all_steps, tokens)
    by_step_id = dict(zip((s.id for s in all_steps), prompts_all))

    # The node/edge graph only sees steps that actually produced images;
    # the history strip, stages, and mini-map cover every attempt.
    graph_steps = [
        by_step_id[s.id] for s in all_steps if s.status == "completed" and s.image_ids
    ]

    image_ids: list[str] = []
    image_step: dict[str, StepRecord] = {}
    for s in all_steps:
        if s.status == "completed":
            for asset_id in s.image_ids:
                image_ids.append(asset_id)
                image_step[asset_id] = s

    embeddings = embed_records(
        [
            (s.prompt, [(a, snapshot.asset_bytes(a)) for a in s.image_ids])
            for s in all_steps
            if s.status == "completed" and s.image_ids
        ],
        provider,
        cache=cache,
        fallback=fallback,
    )
    by_image = {e.image_id: e for e in embeddings}
    degraded = any(e.degraded for e in embeddings)

    n = len(image_ids)
    if n:
        text_mat = np.stack([by_image[i].text_vec for i in image_ids])
        image_mat = np.stack([by_image[i].image_vec for i in image_ids])
        previous = _previous_frame(position_memory, snapshot.version)
        init = _seed_init(image_ids, previous) if previous else None
        proj = projection.project_pair(
            tuple(image_ids),
            text_mat,
            image_mat,
            params.alpha,
            params.seed,
            text_init=init,
            image_init=init,
        )
        if previous:
            transform = projection.previous_frame_transform(
                proj.combined_xy, tuple(image_ids), previous
            )
            if transform is not None:
                matrix, offset = transform
                combined = proj.combined_xy @ matrix.T + offset
                # re-standardize so the cluster-distance scale stays put;
                # the same affine map goes to all three planes to keep
                # combined = alpha*text + (1-alpha)*image exact
                center = combined.mean(axis=0)
                rms = float(np.sqrt(((combined - center) ** 2).sum(axis=1).mean()))
                scale = rms if rms > 1e-12 else 1.0

                def _map(points: np.ndarray) -> np.ndarray:
                    return ((points @ matrix.T + offset) - center) / scale

                proj = projection.Projection2D(
                    image_ids=proj.image_ids,
                    text_xy=_map(proj.text_xy),
                    image_xy=_map(proj.image_xy),
                    combined_xy=_map(proj.combined_xy),
                    alpha=proj.alpha,
                    disparity=proj.disparity,
                )
        _remember_frame(position_memory, snapshot.version, image_ids, proj.combined_xy)
        clusters = clustering.cluster(
            proj.combined_xy, params.cluster_distance, tuple(image_ids)
        )
    else:
        proj = projection.Projection2D(
            image_ids=(),
            text_xy=np.zeros((0, 2)),
            image_xy=np.zeros((0, 2)),
            combined_xy=np.zeros((0, 2)),
            alpha=params.alpha,
            disparity=0.0,
        )
        clusters = clustering.ClusterAssignment(by_image={}, cluster_distance=params.cluster_distance)

    gparams = graph.GraphParams(
        s_min=params.s_min,
        w_min=params.w_min,
        n_e=params.n_e,
        redistribute_passes=params.redistribute_passes,
    )
    diffs = graph.compute_diffs(graph_steps, params.s_min)
    edges = graph.derive_edges(graph_steps, diffs)
    bundles = graph.bundle(edges, clusters)
    for _ in range(gparams.redistribute_passes):
        bundles = graph.redistribute(bundles)
    final_edges = graph.redistributed_edges(bundles)
    pair_edges = graph.merge_equal(final_edges)
    bundles, effective_w_min = graph.filter_bundles(bundles, gparams)

    nodes = [
        graph.ImageNode(
            image_id=i, step_id=image_step[i].id, temporal_order=image_step[i].order
        )
        for i in image_ids
    ]
    weights = graph.node_weights(nodes, final_edges)

    placements = layout.place_nodes(
        image_ids,
        proj.combined_xy,
        weights,
        {i: image_step[i].order for i in image_ids},
        viewport=params.viewport,
        thumb_size=params.thumb_size,
        rect_size=params.rect_size,
    )
    positions = {p.image_id: p.xy for p in placements}
    glyphs = layout.place_glyphs(bundles, positions)

    ordered_all = sorted(prompts_all, key=lambda s: s.temporal_order)
    consecutive = [
        jaccard_similarity(ordered_all[i].tokens, ordered_all[i + 1].tokens)
        for i in range(len(ordered_all) - 1)
    ]
    stages = layout.segment_stages(
        consecutive,
        len(ordered_all),
        params.s_min,
        overrides=list(snapshot.overrides),
        skip_invalid=True,
    )
    bubbles = layout.compute_bubbles(clusters, stages, prompts_all, params.grouping_mode)
    # both grouping variants ship in the document so a client can swap
    # filled bubbles locally without requesting a rebuild
    other_mode = "stage" if params.grouping_mode == "cluster" else "cluster"
    other_filled = [
        b
        for b in layout.compute_bubbles(clusters, stages, prompts_all, other_mode)
        if b.kind != "same_prompt"
    ]
    minimap = layout.minimap_model(
        prompts_all, all_pair_similarities(prompts_all), stages, params.s_min
    )

    return _document(
        snapshot,
        params,
        effective_w_min,
        placements,
        image_step,
        clusters,
        weights,
        bundles,
        glyphs,
        pair_edges,
        bubbles,
        other_filled,
        stages,
        minimap,
        prompts_all,
        degraded,
    )


def _document(
    snapshot,
    params: BuildParams,
    effective_w_min: float,
    placements,
    image_step,
    clusters,
    weights,
    bundles,
    glyphs,
    pair_edges,
    bubbles,
    other_filled,
    stages,
    minimap,
    prompts_all,
    degraded: bool,
) -> dict:
    session_id = snapshot.session.id
    nodes_doc = [
        {
            "image_id": p.image_id,
            "step_id": image_step[p.image_id].id,
            "step_order": image_step[p.image_id].order,
            "x": p.xy[0],
            "y": p.xy[1],
            "mode": p.mode,
            "size": p.size,
            "order_shade": p.order_shade,
            "cluster": clusters.by_image[p.image_id],
            "weight": weights[p.image_id],
            "asset_url": asset_url(session_id, p.image_id),
        }
        for p in placements
    ]
    bundles_doc = [
        {
            "id": idx,
            "word": b.word,
            "action": b.action,
            "src_cluster": b.src_cluster,
            "tgt_cluster": b.tgt_cluster,
            "weight": b.weight,
            "visible": b.visible,
            "members": [
                {"src": e.src, "tgt": e.tgt, "weight": e.weight} for e in b.members
            ],
        }
        for idx, b in enumerate(bundles)
    ]
    glyphs_doc = [
        {
            "x": g.xy[0],
            "y": g.xy[1],
            "slices": [
                {
                    "word": s.word,
                    "action": s.action,
                    "angle_fraction": s.angle_fraction,
                    "radius_fraction": s.radius_fraction,
                    "opacity_class": s.opacity_class,
                }
                for s in g.slices
            ],
            "label_words": list(g.label_words),
            "bundles": list(g.bundles),
        }
        for g in glyphs
    ]
    pair_edges_doc = []
    for e in pair_edges:
        if isinstance(e, MergedEdge):
            pair_edges_doc.append(
                {
                    "src": e.src,
                    "tgt": e.tgt,
                    "merged": True,
                    "modifications": [
                        {
                            "word": m.word,
                            "action": m.action,
                            "weight": m.weight_share,
                            "frequency": m.frequency,
                        }
                        for m in e.modifications
                    ],
                }
            )
        else:
            pair_edges_doc.append(
                {
                    "src": e.src,
                    "tgt": e.tgt,
                    "merged": False,
                    "modifications": [
                        {"word": e.word, "action": e.action, "weight": e.weight, "frequency": 1}
                    ],
                }
            )
    def _bubble(b):
        return {
            "kind": b.kind,
            "members": list(b.member_image_ids),
            "style": b.style,
            "label": b.label,
        }

    bubbles_doc = [_bubble(b) for b in bubbles]
    bubbles_all_doc = [_bubble(b) for b in list(bubbles) + list(other_filled)]
    minimap_doc = {
        "dots": [
            {
                "step_id": d.step_id,
                "token_count": d.token_count,
                "order_shade": d.order_shade,
            }
            for d in minimap.dots
        ],
        "arcs": [
            {
                "src_step": a.src_step,
                "tgt_step": a.tgt_step,
                "similarity": a.similarity,
                "emphasized": a.emphasized,
            }
            for a in minimap.arcs
        ],
        "stage_lines": [list(r) for r in minimap.stage_lines],
    }
    parse_warnings = {
        s.step_id: list(s.tokens.warnings) for s in prompts_all if s.tokens.warnings
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "session": {
            "id": session_id,
            "title": snapshot.session.title,
            "step_count": len(snapshot.steps),
        },
        "params": {
            "alpha": params.alpha,
            "s_min": params.s_min,
            "w_min": effective_w_min,
            "w_min_mode": "manual" if params.w_min is not None else "auto",
            "n_e": params.n_e,
            "cluster_distance": params.cluster_distance,
            "grouping_mode": params.grouping_mode,
            "seed": params.seed,
        },
        "degraded_embeddings": degraded,
        "nodes": nodes_doc,
        "bundles": bundles_doc,
        "glyphs": glyphs_doc,
        "pair_edges": pair_edges_doc,
        "bubbles": bubbles_doc,
        "bubbles_all": bubbles_all_doc,
        "stages": {
            "ranges": [list(r) for r in stages.stages],
            "applied_overrides": [
                {"op": o.op, "at": o.at} for o in stages.applied_overrides
            ],
        },
        "minimap": minimap_doc,
        "parse_warnings": parse_warnings,
    }
