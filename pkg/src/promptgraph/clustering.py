"""Average-linkage agglomerative clustering of the 2-D node positions.

Hand-rolled rather than scipy so the tie rule is pinned: when two merges
are equally close, the pair whose clusters contain the lowest original
point indices wins. Sessions are desk-scale, so the O(n^3) loop is fine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClusterAssignment:
    by_image: dict[str, int]
    cluster_distance: float

    @property
    def n_clusters(self) -> int:
        return len(set(self.by_image.values())) if self.by_image else 0

    def members(self, cluster_id: int) -> list[str]:
        return [i for i, c in self.by_image.items() if c == cluster_id]


def cluster_points(points: np.ndarray, distance_threshold: float) -> list[int]:
    """Labels (dense from 0) after merging while the closest pair of
    clusters is within the threshold, average linkage on Euclidean
    distance. Labels are ordered by each cluster's smallest point index."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n == 0:
        return []
    if n == 1:
        return [0]

    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))

    # Cluster identity = smallest member index; sizes track for the
    # Lance-Williams average-linkage update.
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    d: dict[tuple[int, int], float] = {
        (i, j): float(dist[i, j]) for i in range(n) for j in range(i + 1, n)
    }

    while len(members) > 1:
        (i, j), best = min(d.items(), key=lambda kv: (kv[1], kv[0]))
        if best > distance_threshold:
            break
        ni, nj = len(members[i]), len(members[j])
        members[i].extend(members[j])
        del members[j]
        for k in list(members):
            if k == i:
                continue
            a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
            d[a] = (ni * d[a] + nj * d.pop(b)) / (ni + nj)
        del d[(i, j)]

    labels = [0] * n
    for new_id, root in enumerate(sorted(members)):
        for idx in members[root]:
            labels[idx] = new_id
    return labels


def cluster(
    points: np.ndarray,
    distance_threshold: float,
    image_ids: tuple[str, ...] | None = None,
) -> ClusterAssignment:
    points = np.asarray(points, dtype=float)
    if len(points) < 1:
        raise ValueError("clustering needs at least one point")
    if image_ids is None:
        image_ids = tuple(str(i) for i in range(len(points)))
    if len(image_ids) != len(points):
        raise ValueError("one id per point required")
    labels = cluster_points(points, distance_threshold)
    return ClusterAssignment(
        by_image=dict(zip(image_ids, labels)), cluster_distance=distance_threshold
    )
