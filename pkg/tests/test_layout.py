import random

import numpy as np
import pytest

from promptgraph.clustering import ClusterAssignment
from promptgraph.graph import Edge, StepPrompt, bundle
from promptgraph.layout import (
    InvalidOverride,
    StageOverride,
    compute_bubbles,
    fit_viewport,
    minimap_model,
    place_glyphs,
    place_nodes,
    segment_stages,
    with_override,
)
from promptgraph.prompts import parse_prompt


def greedy_oracle(ids, positions, weights, orders, thumb):
    """Reimplementation of the placement rule, straight from its wording:
    sort by weight desc, keep a thumbnail unless its square overlaps one
    already kept."""
    kept = []
    modes = {}
    for i in sorted(ids, key=lambda i: (-weights[i], orders[i], i)):
        x, y = positions[i]
        clash = any(
            abs(x - kx) < thumb and abs(y - ky) < thumb for kx, ky in kept
        )
        if clash:
            modes[i] = "rect"
        else:
            modes[i] = "thumbnail"
            kept.append((x, y))
    return modes


class TestPlaceNodes:
    def test_single_node_thumbnail_centered(self):
        placements = place_nodes(
            ["only"], np.zeros((1, 2)), {"only": 0.0}, {"only": 1},
            viewport=(800, 600),
        )
        assert placements[0].mode == "thumbnail"
        assert placements[0].xy == (400.0, 300.0)

    def test_coincident_heavier_wins_thumbnail(self):
        ids = ["heavy", "light"]
        placements = place_nodes(
            ids,
            np.zeros((2, 2)),
            {"heavy": 2.0, "light": 1.0},
            {"heavy": 1, "light": 2},
        )
        by_id = {p.image_id: p for p in placements}
        assert by_id["heavy"].mode == "thumbnail"
        assert by_id["light"].mode == "rect"

    def test_tight_grid_matches_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            n = 10
            ids = [f"i{k}" for k in range(n)]
            xy = rng.uniform(-1, 1, size=(n, 2))
            weights = {i: float(rng.uniform(0, 3)) for i in ids}
            orders = {i: k + 1 for k, i in enumerate(ids)}
            placements = place_nodes(ids, xy, weights, orders, thumb_size=64)
            pos = {p.image_id: p.xy for p in placements}
            expect = greedy_oracle(ids, pos, weights, orders, 64)
            assert {p.image_id: p.mode for p in placements} == expect

    def test_no_thumbnail_overlap_fuzz(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            n = int(rng.integers(1, 25))
            ids = [f"i{k}" for k in range(n)]
            xy = rng.uniform(-1, 1, size=(n, 2))
            weights = {i: float(rng.uniform(0, 1)) for i in ids}
            orders = {i: k + 1 for k, i in enumerate(ids)}
            thumbs = [
                p for p in place_nodes(ids, xy, weights, orders) if p.mode == "thumbnail"
            ]
            for a in range(len(thumbs)):
                for b in range(a + 1, len(thumbs)):
                    dx = abs(thumbs[a].xy[0] - thumbs[b].xy[0])
                    dy = abs(thumbs[a].xy[1] - thumbs[b].xy[1])
                    assert dx >= 64 or dy >= 64

    def test_every_node_placed_once(self):
        ids = [f"i{k}" for k in range(7)]
        placements = place_nodes(
            ids, np.random.default_rng(3).normal(size=(7, 2)),
            {i: 1.0 for i in ids}, {i: 1 for i in ids},
        )
        assert [p.image_id for p in placements] == ids

    def test_order_shades_increase_with_time(self):
        ids = ["a", "b", "c"]
        placements = place_nodes(
            ids, np.random.default_rng(4).normal(size=(3, 2)),
            {i: 0.0 for i in ids}, {"a": 1, "b": 2, "c": 3},
        )
        shades = [p.order_shade for p in placements]
        assert shades == [0.0, 0.5, 1.0]

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        ids = [f"i{k}" for k in range(9)]
        xy = rng.normal(size=(9, 2))
        weights = {i: float(rng.uniform()) for i in ids}
        orders = {i: k for k, i in enumerate(ids)}
        a = place_nodes(ids, xy, weights, orders)
        b = place_nodes(ids, xy, weights, orders)
        assert a == b


class TestFitViewport:
    def test_preserves_aspect_ratio(self):
        xy = np.array([[0.0, 0.0], [4.0, 1.0]])
        out = fit_viewport(xy, (1000, 1000), 100)
        w = out[:, 0].max() - out[:, 0].min()
        h = out[:, 1].max() - out[:, 1].min()
        assert w / h == pytest.approx(4.0)

    def test_margin_respected(self):
        rng = np.random.default_rng(6)
        out = fit_viewport(rng.normal(size=(40, 2)), (1200, 800), 40)
        assert out[:, 0].min() >= 40 - 1e-9 and out[:, 0].max() <= 1160 + 1e-9
        assert out[:, 1].min() >= 40 - 1e-9 and out[:, 1].max() <= 760 + 1e-9


class TestPlaceGlyphs:
    def _bundles(self, edges, cluster_of):
        clusters = ClusterAssignment(by_image=cluster_of, cluster_distance=1.0)
        return bundle(edges, clusters)

    def test_midpoint_of_two_nodes(self):
        bundles = self._bundles(
            [Edge("w", "insert", "a", "b", 1.0)], {"a": 0, "b": 1}
        )
        glyphs = place_glyphs(bundles, {"a": (0.0, 0.0), "b": (2.0, 2.0)})
        assert glyphs[0].xy == (1.0, 1.0)

    def test_single_modification_full_circle(self):
        bundles = self._bundles([Edge("w", "insert", "a", "b", 1.0)], {"a": 0, "b": 1})
        glyphs = place_glyphs(bundles, {"a": (0, 0), "b": (1, 1)})
        assert glyphs[0].slices[0].angle_fraction == 1.0
        assert glyphs[0].slices[0].radius_fraction == 1.0

    def test_frequency_three_to_one(self):
        # same modification on 3 member edges vs another on 1, same pairs
        edges = [
            Edge("u", "insert", "a", "d", 0.2),
            Edge("u", "insert", "b", "d", 0.2),
            Edge("u", "insert", "c", "d", 0.2),
            Edge("v", "remove", "a", "d", 0.1),
            Edge("v", "remove", "b", "d", 0.1),
            Edge("v", "remove", "c", "d", 0.1),
        ]
        cluster_of = {"a": 0, "b": 0, "c": 0, "d": 1}
        bundles = self._bundles(edges, cluster_of)
        positions = {k: (float(i), 0.0) for i, k in enumerate("abcd")}
        glyphs = place_glyphs(bundles, positions)
        assert len(glyphs) == 1
        fractions = sorted(s.angle_fraction for s in glyphs[0].slices)
        assert fractions == [0.5, 0.5]

    def test_angle_fractions_sum_to_one(self):
        edges = [
            Edge("u", "insert", "a", "c", 0.5),
            Edge("u", "insert", "b", "c", 0.5),
            Edge("v", "remove", "a", "c", 0.3),
        ]
        # different member pair sets -> two glyph groups
        bundles = self._bundles(edges, {"a": 0, "b": 0, "c": 1})
        glyphs = place_glyphs(
            bundles, {"a": (0, 0), "b": (2, 0), "c": (1, 2)}
        )
        for g in glyphs:
            assert sum(s.angle_fraction for s in g.slices) == pytest.approx(1.0)

    def test_barycenter_counts_endpoint_multiplicity(self):
        edges = [
            Edge("u", "insert", "a", "c", 0.5),
            Edge("u", "insert", "b", "c", 0.5),
        ]
        bundles = self._bundles(edges, {"a": 0, "b": 0, "c": 1})
        glyphs = place_glyphs(bundles, {"a": (0, 0), "b": (4, 0), "c": (2, 4)})
        assert glyphs[0].xy == (2.0, 2.0)  # (0+2+4+2)/4, (0+4+0+4)/4

    def test_invisible_bundles_get_no_glyph(self):
        from dataclasses import replace

        bundles = self._bundles([Edge("w", "insert", "a", "b", 1.0)], {"a": 0, "b": 1})
        hidden = [replace(b, visible=False) for b in bundles]
        assert place_glyphs(hidden, {"a": (0, 0), "b": (1, 1)}) == []

    def test_combined_glyph_for_shared_pairs(self):
        # insert 1girl + remove 1boy over the same image pair: one glyph
        edges = [
            Edge("1girl", "insert", "a", "b", 0.5),
            Edge("1boy", "remove", "a", "b", 0.5),
        ]
        bundles = self._bundles(edges, {"a": 0, "b": 1})
        glyphs = place_glyphs(bundles, {"a": (0, 0), "b": (2, 0)})
        assert len(glyphs) == 1
        assert set(glyphs[0].label_words) == {"+1girl", "-1boy"}


class TestStages:
    def test_all_similar_one_stage(self):
        seg = segment_stages([0.9, 0.8, 0.95], 4, 0.6)
        assert seg.stages == ((1, 4),)

    def test_none_similar_n_stages(self):
        seg = segment_stages([0.1, 0.0, 0.2], 4, 0.6)
        assert seg.stages == ((1, 1), (2, 2), (3, 3), (4, 4))

    def test_spec_sequence(self):
        seg = segment_stages([0.9, 0.2, 0.8], 4, 0.6)
        assert seg.stages == ((1, 2), (3, 4))

    def test_split_then_merge_roundtrip(self):
        base = segment_stages([0.9, 0.9, 0.9], 4, 0.6)
        split = with_override(base, 4, StageOverride("split", 3))
        assert split.stages == ((1, 2), (3, 4))
        merged = with_override(split, 4, StageOverride("merge", 3))
        assert merged.stages == base.stages

    def test_merge_then_split_roundtrip(self):
        base = segment_stages([0.9, 0.2, 0.8], 4, 0.6)
        merged = with_override(base, 4, StageOverride("merge", 3))
        assert merged.stages == ((1, 4),)
        split = with_override(merged, 4, StageOverride("split", 3))
        assert split.stages == base.stages

    def test_invalid_override_rejected(self):
        base = segment_stages([0.9, 0.9], 3, 0.6)
        with pytest.raises(InvalidOverride):
            with_override(base, 3, StageOverride("merge", 2))  # not a boundary
        with pytest.raises(InvalidOverride):
            with_override(base, 3, StageOverride("split", 1))  # first step
        with pytest.raises(InvalidOverride):
            with_override(base, 3, StageOverride("split", 9))  # out of range

    def test_replay_skips_stale_overrides(self):
        seg = segment_stages(
            [0.9, 0.9], 3, 0.6,
            overrides=[StageOverride("merge", 2), StageOverride("split", 3)],
            skip_invalid=True,
        )
        assert seg.stages == ((1, 2), (3, 3))
        assert seg.applied_overrides == (StageOverride("split", 3),)

    def test_partition_property_fuzz(self):
        rng = random.Random(11)
        for _ in range(100):
            n = rng.randint(1, 12)
            sims = [rng.random() for _ in range(n - 1)]
            seg = segment_stages(sims, n, 0.6)
            covered = [step for start, end in seg.stages for step in range(start, end + 1)]
            assert covered == list(range(1, n + 1))

    def test_zero_steps(self):
        assert segment_stages([], 0, 0.6).stages == ()


def _steps(prompts, images_per_step=0):
    return [
        StepPrompt(
            step_id=f"s{i + 1}",
            temporal_order=i + 1,
            tokens=parse_prompt(p),
            image_ids=tuple(f"s{i + 1}-img{k}" for k in range(images_per_step)),
        )
        for i, p in enumerate(prompts)
    ]


class TestBubbles:
    def test_same_prompt_single_cluster_no_dashed(self):
        steps = _steps(["a cat"], images_per_step=4)
        clusters = ClusterAssignment(
            by_image={i: 0 for i in steps[0].image_ids}, cluster_distance=1
        )
        seg = segment_stages([], 1, 0.6)
        bubbles = compute_bubbles(clusters, seg, steps)
        assert all(b.kind != "same_prompt" for b in bubbles)

    def test_same_prompt_two_clusters_gets_dashed(self):
        steps = _steps(["a cat"], images_per_step=2)
        ids = steps[0].image_ids
        clusters = ClusterAssignment(
            by_image={ids[0]: 0, ids[1]: 1}, cluster_distance=1
        )
        seg = segment_stages([], 1, 0.6)
        bubbles = compute_bubbles(clusters, seg, steps)
        dashed = [b for b in bubbles if b.style == "dashed"]
        assert len(dashed) == 1
        assert dashed[0].kind == "same_prompt"
        assert set(dashed[0].member_image_ids) == set(ids)

    def test_stage_mode_three_stages_three_bubbles(self):
        steps = _steps(["a", "a b", "c d", "e f"], images_per_step=1)
        clusters = ClusterAssignment(
            by_image={i: 0 for s in steps for i in s.image_ids}, cluster_distance=1
        )
        seg = segment_stages([0.9, 0.0, 0.0], 4, 0.6)
        assert len(seg.stages) == 3
        bubbles = compute_bubbles(clusters, seg, steps, grouping_mode="stage")
        filled = [b for b in bubbles if b.style == "filled"]
        assert len(filled) == 3
        assert all(b.kind == "stage" for b in filled)

    def test_cluster_mode_one_bubble_per_cluster(self):
        steps = _steps(["a", "b"], images_per_step=1)
        ids = [i for s in steps for i in s.image_ids]
        clusters = ClusterAssignment(
            by_image={ids[0]: 0, ids[1]: 1}, cluster_distance=1
        )
        seg = segment_stages([0.0], 2, 0.6)
        bubbles = compute_bubbles(clusters, seg, steps, grouping_mode="cluster")
        assert len([b for b in bubbles if b.kind == "cluster"]) == 2

    def test_dashed_only_for_dashed_kind(self):
        steps = _steps(["a cat"], images_per_step=2)
        ids = steps[0].image_ids
        clusters = ClusterAssignment(by_image={ids[0]: 0, ids[1]: 1}, cluster_distance=1)
        bubbles = compute_bubbles(clusters, segment_stages([], 1, 0.6), steps)
        for b in bubbles:
            assert (b.style == "dashed") == (b.kind == "same_prompt")


class TestMiniMap:
    def test_single_step(self):
        steps = _steps(["hello world"])
        model = minimap_model(steps, {}, segment_stages([], 1, 0.6), 0.6)
        assert len(model.dots) == 1
        assert model.dots[0].token_count == 2
        assert model.arcs == ()

    def test_two_similar_steps_one_emphasized_arc(self):
        steps = _steps(["a b c", "a b c d"])
        sims = {("s1", "s2"): 0.75}
        model = minimap_model(steps, sims, segment_stages([0.75], 2, 0.6), 0.6)
        assert len(model.arcs) == 1
        assert model.arcs[0].emphasized is True

    def test_tie_emphasizes_most_recent(self):
        steps = _steps(["p1", "p2", "p3", "p4", "p5", "p6"])
        sims = {
            ("s2", "s6"): 0.8,
            ("s5", "s6"): 0.8,
            ("s1", "s6"): 0.7,
        }
        model = minimap_model(steps, sims, segment_stages([0.0] * 5, 6, 0.6), 0.6)
        emphasized = [a for a in model.arcs if a.emphasized and a.tgt_step == "s6"]
        assert len(emphasized) == 1
        assert emphasized[0].src_step == "s5"

    def test_emphasized_targets_strictly_earlier(self):
        rng = random.Random(13)
        steps = _steps([f"w{rng.randint(0, 3)} x{rng.randint(0, 3)}" for _ in range(8)])
        from promptgraph.pipeline import all_pair_similarities

        sims = all_pair_similarities(steps)
        model = minimap_model(steps, sims, segment_stages([0.0] * 7, 8, 0.0), 0.0)
        order = {s.step_id: s.temporal_order for s in steps}
        for arc in model.arcs:
            if arc.emphasized:
                assert order[arc.src_step] < order[arc.tgt_step]
        by_tgt = {}
        for arc in model.arcs:
            if arc.emphasized:
                assert arc.tgt_step not in by_tgt
                by_tgt[arc.tgt_step] = arc

    def test_dissimilar_pairs_get_no_arc(self):
        steps = _steps(["a b", "c d"])
        sims = {("s1", "s2"): 0.0}
        model = minimap_model(steps, sims, segment_stages([0.0], 2, 0.6), 0.6)
        assert model.arcs == ()

    def test_stage_lines_mirror_segmentation(self):
        steps = _steps(["a", "a b", "c"])
        seg = segment_stages([0.5, 0.0], 3, 0.6)
        model = minimap_model(steps, {}, seg, 0.6)
        assert model.stage_lines == seg.stages
