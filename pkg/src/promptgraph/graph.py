"""The variant graph: images as nodes, word edits as weighted edges.

Every pair of sufficiently similar prompts contributes one edge per
(word modification, source image, target image), directed from the earlier
step to the later one. Edge weights start uniform at 1/(n1*n2*m), are
summed into bundles keyed by (word, action, source cluster, target
cluster), redistributed within each image pair in proportion to the
bundles' global weights, then merged and filtered for display.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .clustering import ClusterAssignment
from .diffing import PromptDiff, diff_prompts
from .prompts import PromptTokens, jaccard_similarity

MERGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ImageNode:
    image_id: str
    step_id: str
    temporal_order: int


@dataclass(frozen=True)
class StepPrompt:
    """One prompting step as the graph sees it."""

    step_id: str
    temporal_order: int
    tokens: PromptTokens
    image_ids: tuple[str, ...]


@dataclass(frozen=True)
class Edge:
    word: str
    action: str
    src: str
    tgt: str
    weight: float

    def __post_init__(self) -> None:
        if self.src == self.tgt:
            raise ValueError("self edges are not allowed")
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise ValueError(f"edge weight must be finite and positive: {self.weight}")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.src, self.tgt)


BundleKey = tuple[str, str, int, int]


@dataclass(frozen=True)
class BundledEdge:
    word: str
    action: str
    src_cluster: int
    tgt_cluster: int
    weight: float
    members: tuple[Edge, ...]
    visible: bool = True

    @property
    def key(self) -> BundleKey:
        return (self.word, self.action, self.src_cluster, self.tgt_cluster)


@dataclass(frozen=True)
class Modification:
    word: str
    action: str
    weight_share: float
    frequency: int


@dataclass(frozen=True)
class MergedEdge:
    """Equal-weight multi-edges of one image pair collapsed together."""

    src: str
    tgt: str
    modifications: tuple[Modification, ...]

    @property
    def pair(self) -> tuple[str, str]:
        return (self.src, self.tgt)


@dataclass(frozen=True)
class GraphParams:
    s_min: float = 0.6
    w_min: float | None = None  # None = auto from the bundle cap
    n_e: int = 12
    redistribute_passes: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.s_min <= 1.0:
            raise ValueError("s_min must be in [0, 1]")
        if self.w_min is not None and self.w_min < 0:
            raise ValueError("w_min must be nonnegative")
        if self.n_e < 1:
            raise ValueError("n_e must be positive")
        if self.redistribute_passes < 1:
            raise ValueError("redistribute_passes must be >=1")


def similar_pairs(
    steps: Sequence[StepPrompt], s_min: float
) -> list[tuple[StepPrompt, StepPrompt, float]]:
    """All (earlier, later) step pairs with jaccard similarity >= s_min."""
    ordered = sorted(steps, key=lambda s: s.temporal_order)
    out = []
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            sim = jaccard_similarity(ordered[i].tokens, ordered[j].tokens)
            if sim >= s_min:
                out.append((ordered[i], ordered[j], sim))
    return out


def compute_diffs(
    steps: Sequence[StepPrompt], s_min: float
) -> dict[tuple[str, str], PromptDiff]:
    """Word-level diffs for every similar pair, keyed (src_step, tgt_step)."""
    return {
        (a.step_id, b.step_id): diff_prompts(a.tokens, b.tokens, a.step_id, b.step_id)
        for a, b, _ in similar_pairs(steps, s_min)
    }


def derive_edges(
    steps: Sequence[StepPrompt], diffs: Mapping[tuple[str, str], PromptDiff]
) -> list[Edge]:
    """Initial edges: per similar pair, one edge per (op, src image, tgt
    image), each carrying 1/(n1*n2*m). Identical prompts (m=0) and steps
    without images contribute nothing."""
    by_id = {s.step_id: s for s in steps}
    edges = []
    for (src_step, tgt_step), diff in diffs.items():
        a, b = by_id[src_step], by_id[tgt_step]
        n1, n2, m = len(a.image_ids), len(b.image_ids), diff.m
        if m == 0 or n1 == 0 or n2 == 0:
            continue
        w = 1.0 / (n1 * n2 * m)
        for op in diff.ops:
            for src in a.image_ids:
                for tgt in b.image_ids:
                    edges.append(Edge(word=op.word, action=op.action, src=src, tgt=tgt, weight=w))
    return edges


def bundle(edges: Iterable[Edge], clusters: ClusterAssignment) -> list[BundledEdge]:
    """Group edges sharing (word, action, src cluster, tgt cluster)."""
    groups: dict[BundleKey, list[Edge]] = {}
    for e in edges:
        key = (e.word, e.action, clusters.by_image[e.src], clusters.by_image[e.tgt])
        groups.setdefault(key, []).append(e)
    return [
        BundledEdge(
            word=key[0],
            action=key[1],
            src_cluster=key[2],
            tgt_cluster=key[3],
            weight=sum(e.weight for e in members),
            members=tuple(members),
        )
        for key, members in sorted(groups.items())
    ]


def redistribute(bundles: Sequence[BundledEdge]) -> list[BundledEdge]:
    """Re-split each image pair's unit of weight in proportion to the
    global weight of the bundle each edge belongs to, then re-sum the
    bundles. One simultaneous pass: every edge is renormalized against the
    pre-pass bundle weights."""
    bundle_weight_of: dict[tuple[BundleKey, str, str], float] = {}
    pair_denominator: dict[tuple[str, str], float] = {}
    for b in bundles:
        for e in b.members:
            bundle_weight_of[(b.key, e.src, e.tgt)] = b.weight
            pair_denominator[e.pair] = pair_denominator.get(e.pair, 0.0) + b.weight

    out = []
    for b in bundles:
        new_members = tuple(
            replace(e, weight=bundle_weight_of[(b.key, e.src, e.tgt)] / pair_denominator[e.pair])
            for e in b.members
        )
        out.append(replace(b, members=new_members, weight=sum(e.weight for e in new_members)))
    return out


def merge_equal(edges: Sequence[Edge]) -> list[Edge | MergedEdge]:
    """Within each image pair, collapse edges of equal weight (within
    tolerance) into one merged edge listing all the modifications."""
    by_pair: dict[tuple[str, str], list[Edge]] = {}
    order: list[tuple[str, str]] = []
    for e in edges:
        if e.pair not in by_pair:
            order.append(e.pair)
        by_pair.setdefault(e.pair, []).append(e)

    out: list[Edge | MergedEdge] = []
    for pair in order:
        group = sorted(by_pair[pair], key=lambda e: (e.weight, e.word, e.action))
        runs: list[list[Edge]] = [[group[0]]]
        for e in group[1:]:
            if abs(e.weight - runs[-1][0].weight) <= MERGE_TOLERANCE:
                runs[-1].append(e)
            else:
                runs.append([e])
        for run in runs:
            if len(run) == 1:
                out.append(run[0])
            else:
                freq: dict[tuple[str, str], int] = {}
                for e in run:
                    freq[(e.word, e.action)] = freq.get((e.word, e.action), 0) + 1
                mods = tuple(
                    Modification(word=w, action=a, weight_share=run[0].weight, frequency=c)
                    for (w, a), c in sorted(freq.items())
                )
                out.append(MergedEdge(src=pair[0], tgt=pair[1], modifications=mods))
    return out


def filter_bundles(
    bundles: Sequence[BundledEdge], params: GraphParams
) -> tuple[list[BundledEdge], float]:
    """Flag which bundles are shown.

    Manual mode applies the user threshold directly. Auto mode picks the
    weight of the n_e-th largest bundle; if ties at that cutoff would push
    the visible count past n_e, the threshold rises just past the tie.
    Hidden bundles stay in the result, flagged invisible.
    """
    if params.w_min is not None:
        w_min = params.w_min
    elif len(bundles) <= params.n_e:
        w_min = 0.0
    else:
        weights = sorted((b.weight for b in bundles), reverse=True)
        cutoff = weights[params.n_e - 1]
        if sum(1 for w in weights if w >= cutoff) <= params.n_e:
            w_min = cutoff
        else:
            higher = [w for w in weights if w > cutoff]
            w_min = min(higher) if higher else math.nextafter(cutoff, math.inf)
    flagged = [replace(b, visible=b.weight >= w_min) for b in bundles]
    return flagged, w_min


def node_weights(
    nodes: Sequence[ImageNode], edges: Sequence[Edge]
) -> dict[str, float]:
    """Sum of incident edge weights per image; isolated nodes get 0."""
    weights = {n.image_id: 0.0 for n in nodes}
    for e in edges:
        weights[e.src] = weights.get(e.src, 0.0) + e.weight
        weights[e.tgt] = weights.get(e.tgt, 0.0) + e.weight
    return weights


def redistributed_edges(bundles: Sequence[BundledEdge]) -> list[Edge]:
    """Flatten bundle members back to a per-edge list (stable order)."""
    return [e for b in bundles for e in b.members]
