"""Renderable layout: where everything goes and how it is grouped.

The engine resolves all geometry and grouping decisions (node positions
and display mode, glyph placement and slice fractions, bubble memberships,
stage ranges, mini-map arcs); the UI only draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import ClusterAssignment
from .graph import BundledEdge, StepPrompt

THUMBNAIL = "thumbnail"
RECT = "rect"

_ACTION_MARK = {
    "insert": "+",
    "remove": "-",
    "reorder": "~",
    "increase_weight": "^",
    "decrease_weight": "v",
}


@dataclass(frozen=True)
class NodePlacement:
    image_id: str
    xy: tuple[float, float]
    mode: str  # thumbnail | rect
    size: float
    order_shade: float  # temporal rank in [0, 1], 1 = latest


@dataclass(frozen=True)
class GlyphSlice:
    word: str
    action: str
    angle_fraction: float
    radius_fraction: float
    opacity_class: str  # normal | low


@dataclass(frozen=True)
class GlyphSpec:
    xy: tuple[float, float]
    slices: tuple[GlyphSlice, ...]
    label_words: tuple[str, ...]
    bundles: tuple[int, ...]  # indices into the bundle list passed in


@dataclass(frozen=True)
class BubbleSpec:
    kind: str  # cluster | stage | same_prompt
    member_image_ids: tuple[str, ...]
    style: str  # filled | dashed
    label: str = ""


@dataclass(frozen=True)
class StageOverride:
    op: str  # split | merge
    at: int  # step position (1-based) starting the later stage

    def __post_init__(self) -> None:
        if self.op not in ("split", "merge"):
            raise ValueError(f"unknown stage override op {self.op!r}")


class InvalidOverride(ValueError):
    pass


@dataclass(frozen=True)
class StageSegmentation:
    stages: tuple[tuple[int, int], ...]  # 1-based inclusive step ranges
    applied_overrides: tuple[StageOverride, ...] = ()

    @property
    def boundaries(self) -> tuple[int, ...]:
        """Step positions that start a stage, excluding the first."""
        return tuple(start for start, _ in self.stages[1:])


@dataclass(frozen=True)
class MiniMapDot:
    step_id: str
    token_count: int
    order_shade: float


@dataclass(frozen=True)
class MiniMapArc:
    src_step: str
    tgt_step: str
    similarity: float
    emphasized: bool = False


@dataclass(frozen=True)
class MiniMapModel:
    dots: tuple[MiniMapDot, ...]
    arcs: tuple[MiniMapArc, ...]
    stage_lines: tuple[tuple[int, int], ...]


def order_shades(orders: list[int]) -> dict[int, float]:
    """Normalized temporal rank per distinct order value; 1 = latest."""
    if not orders:
        return {}
    lo, hi = min(orders), max(orders)
    if hi == lo:
        return {o: 1.0 for o in orders}
    return {o: (o - lo) / (hi - lo) for o in set(orders)}


def fit_viewport(
    xy: np.ndarray, viewport: tuple[float, float], margin: float
) -> np.ndarray:
    """Map positions into the viewport, preserving aspect ratio."""
    xy = np.asarray(xy, dtype=float)
    width, height = viewport
    inner_w, inner_h = width - 2 * margin, height - 2 * margin
    if inner_w <= 0 or inner_h <= 0:
        raise ValueError("viewport too small for the margin")
    if len(xy) == 0:
        return xy.reshape(0, 2)
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    extent = hi - lo
    scale_candidates = [
        inner_w / extent[0] if extent[0] > 0 else np.inf,
        inner_h / extent[1] if extent[1] > 0 else np.inf,
    ]
    scale = min(scale_candidates)
    if not np.isfinite(scale):
        scale = 1.0
    center = (lo + hi) / 2
    out = (xy - center) * scale
    out += np.array([width / 2, height / 2])
    return out


def _squares_overlap(
    a: tuple[float, float], sa: float, b: tuple[float, float], sb: float
) -> bool:
    half = (sa + sb) / 2
    return abs(a[0] - b[0]) < half and abs(a[1] - b[1]) < half


def place_nodes(
    image_ids: list[str],
    combined_xy: np.ndarray,
    weights: dict[str, float],
    temporal_order: dict[str, int],
    viewport: tuple[float, float] = (1200.0, 800.0),
    thumb_size: float = 64.0,
    rect_size: float = 16.0,
    margin: float | None = None,
) -> list[NodePlacement]:
    """Greedy thumbnail placement by descending node weight.

    Heavier images claim thumbnail space first (ties go to the earlier
    step, then the id); an image whose thumbnail square would overlap an
    already-placed thumbnail is demoted to a small rectangle instead of
    being moved.
    """
    if margin is None:
        margin = thumb_size / 2 + 8
    scaled = fit_viewport(combined_xy, viewport, margin)
    pos = {i: (float(x), float(y)) for i, (x, y) in zip(image_ids, scaled)}
    shades = order_shades([temporal_order[i] for i in image_ids])

    order = sorted(
        image_ids, key=lambda i: (-weights.get(i, 0.0), temporal_order[i], i)
    )
    placed: list[NodePlacement] = []
    thumbs: list[tuple[tuple[float, float], float]] = []
    for image_id in order:
        xy = pos[image_id]
        collides = any(_squares_overlap(xy, thumb_size, q, s) for q, s in thumbs)
        mode = RECT if collides else THUMBNAIL
        size = rect_size if collides else thumb_size
        if not collides:
            thumbs.append((xy, thumb_size))
        placed.append(
            NodePlacement(
                image_id=image_id,
                xy=xy,
                mode=mode,
                size=size,
                order_shade=shades[temporal_order[image_id]],
            )
        )
    placed.sort(key=lambda p: image_ids.index(p.image_id))
    return placed


def place_glyphs(
    bundles: list[BundledEdge], positions: dict[str, tuple[float, float]]
) -> list[GlyphSpec]:
    """One glyph per group of visible bundles that connect exactly the
    same image pairs between the same clusters, positioned at the
    barycenter of the member edges' endpoints.

    Slice angles split by modification frequency; radius is the slice's
    bundle weight relative to the largest in the glyph; below-median
    weights are flagged low opacity.
    """
    groups: dict[tuple, list[int]] = {}
    for idx, b in enumerate(bundles):
        if not b.visible:
            continue
        pairs = frozenset(e.pair for e in b.members)
        key = (b.src_cluster, b.tgt_cluster, pairs)
        groups.setdefault(key, []).append(idx)

    glyphs = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], sorted(k[2]))):
        idxs = groups[key]
        endpoints = []
        for idx in idxs:
            for e in bundles[idx].members:
                endpoints.append(positions[e.src])
                endpoints.append(positions[e.tgt])
        center = np.asarray(endpoints, dtype=float).mean(axis=0)

        slices_raw = []  # (word, action, frequency, weight)
        for idx in idxs:
            b = bundles[idx]
            slices_raw.append((b.word, b.action, len(b.members), b.weight))
        slices_raw.sort(key=lambda s: (-s[3], s[0], s[1]))
        total_freq = sum(s[2] for s in slices_raw)
        max_weight = max(s[3] for s in slices_raw)
        median_weight = float(np.median([s[3] for s in slices_raw]))
        slices = tuple(
            GlyphSlice(
                word=word,
                action=action,
                angle_fraction=freq / total_freq,
                radius_fraction=weight / max_weight if max_weight > 0 else 1.0,
                opacity_class="low" if weight < median_weight else "normal",
            )
            for word, action, freq, weight in slices_raw
        )
        labels = tuple(f"{_ACTION_MARK[s.action]}{s.word}" for s in slices)
        glyphs.append(
            GlyphSpec(
                xy=(float(center[0]), float(center[1])),
                slices=slices,
                label_words=labels,
                bundles=tuple(idxs),
            )
        )
    return glyphs


def _ranges(boundaries: set[int], n_steps: int) -> tuple[tuple[int, int], ...]:
    starts = [1] + sorted(boundaries)
    return tuple(
        (start, (starts[i + 1] - 1) if i + 1 < len(starts) else n_steps)
        for i, start in enumerate(starts)
    )


def _apply_override(boundaries: set[int], n_steps: int, ov: StageOverride) -> None:
    if ov.op == "split" and 2 <= ov.at <= n_steps and ov.at not in boundaries:
        boundaries.add(ov.at)
    elif ov.op == "merge" and ov.at in boundaries:
        boundaries.remove(ov.at)
    else:
        raise InvalidOverride(f"{ov.op} at step {ov.at} does not apply")


def segment_stages(
    consecutive_similarities: list[float],
    n_steps: int,
    s_min: float,
    overrides: list[StageOverride] | None = None,
    skip_invalid: bool = False,
) -> StageSegmentation:
    """Split the step sequence into exploration stages.

    A step starts a new stage when its prompt is not similar to the
    previous step's. User overrides (split at a step / merge at a
    boundary) replay on top; invalid ones either raise or, during replay
    of persisted history against a changed session, are skipped.
    """
    if n_steps < 0 or len(consecutive_similarities) != max(0, n_steps - 1):
        raise ValueError("need one similarity per consecutive step pair")
    if n_steps == 0:
        return StageSegmentation(stages=())

    boundaries = {
        i + 2 for i, sim in enumerate(consecutive_similarities) if sim < s_min
    }
    applied = []
    for ov in overrides or []:
        try:
            _apply_override(boundaries, n_steps, ov)
        except InvalidOverride:
            if skip_invalid:
                continue
            raise
        applied.append(ov)
    return StageSegmentation(
        stages=_ranges(boundaries, n_steps), applied_overrides=tuple(applied)
    )


def with_override(
    segmentation: StageSegmentation, n_steps: int, override: StageOverride
) -> StageSegmentation:
    """Apply one new override on top of an existing segmentation; raises
    InvalidOverride when it does not address a real boundary/step."""
    boundaries = set(segmentation.boundaries)
    _apply_override(boundaries, n_steps, override)
    return StageSegmentation(
        stages=_ranges(boundaries, n_steps),
        applied_overrides=segmentation.applied_overrides + (override,),
    )


def compute_bubbles(
    clusters: ClusterAssignment,
    stages: StageSegmentation,
    steps: list[StepPrompt],
    grouping_mode: str = "cluster",
) -> list[BubbleSpec]:
    """Filled bubbles per cluster or per stage, plus dashed bubbles for
    prompts whose output images landed in more than one cluster."""
    if grouping_mode not in ("cluster", "stage"):
        raise ValueError(f"unknown grouping mode {grouping_mode!r}")

    bubbles = []
    if grouping_mode == "cluster":
        by_cluster: dict[int, list[str]] = {}
        for step in steps:
            for image_id in step.image_ids:
                by_cluster.setdefault(clusters.by_image[image_id], []).append(image_id)
        for cid in sorted(by_cluster):
            bubbles.append(
                BubbleSpec(
                    kind="cluster",
                    member_image_ids=tuple(by_cluster[cid]),
                    style="filled",
                    label=f"cluster {cid}",
                )
            )
    else:
        ordered = sorted(steps, key=lambda s: s.temporal_order)
        for idx, (start, end) in enumerate(stages.stages):
            members = tuple(
                image_id
                for step in ordered[start - 1 : end]
                for image_id in step.image_ids
            )
            bubbles.append(
                BubbleSpec(
                    kind="stage",
                    member_image_ids=members,
                    style="filled",
                    label=f"stage {idx + 1}",
                )
            )

    by_prompt: dict[str, list[str]] = {}
    for step in sorted(steps, key=lambda s: s.temporal_order):
        by_prompt.setdefault(step.tokens.raw, []).extend(step.image_ids)
    for raw, image_ids in by_prompt.items():
        spanned = {clusters.by_image[i] for i in image_ids}
        if len(spanned) >= 2:
            bubbles.append(
                BubbleSpec(
                    kind="same_prompt",
                    member_image_ids=tuple(image_ids),
                    style="dashed",
                    label=raw,
                )
            )
    return bubbles


def minimap_model(
    steps: list[StepPrompt],
    pair_similarities: dict[tuple[str, str], float],
    stages: StageSegmentation,
    s_min: float,
) -> MiniMapModel:
    """Dot-and-arc summary strip of the prompt history.

    Dots carry prompt length and temporal shade; arcs join every similar
    pair; per dot, the arc to the most similar strictly earlier dot is
    emphasized (ties resolve to the most recent candidate).
    """
    ordered = sorted(steps, key=lambda s: s.temporal_order)
    shades = order_shades([s.temporal_order for s in ordered])
    dots = tuple(
        MiniMapDot(
            step_id=s.step_id,
            token_count=len(s.tokens),
            order_shade=shades[s.temporal_order],
        )
        for s in ordered
    )

    emphasized: dict[str, str] = {}
    for j, later in enumerate(ordered):
        best: tuple[float, int] | None = None
        for i in range(j):
            sim = pair_similarities.get((ordered[i].step_id, later.step_id))
            if sim is None or sim < s_min:
                continue
            if best is None or (sim, i) >= best:
                best = (sim, i)
        if best is not None:
            emphasized[later.step_id] = ordered[best[1]].step_id

    arcs = []
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            src, tgt = ordered[i].step_id, ordered[j].step_id
            sim = pair_similarities.get((src, tgt))
            if sim is not None and sim >= s_min:
                arcs.append(
                    MiniMapArc(
                        src_step=src,
                        tgt_step=tgt,
                        similarity=sim,
                        emphasized=emphasized.get(tgt) == src,
                    )
                )
    return MiniMapModel(dots=dots, arcs=tuple(arcs), stage_lines=stages.stages)
